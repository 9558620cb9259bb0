#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cxrforge {

/// Ordered finding names offered as candidates in prompts. Names are stored
/// lowercased; order is the canonical answer order.
class FindingVocabulary {
  public:
    FindingVocabulary() = default;

    /// Throws InputError on empty or duplicate names, or when `no_finding`
    /// is not one of `names`.
    static FindingVocabulary make(const std::vector<std::string> &names,
                                  std::optional<std::string> no_finding = std::nullopt);

    const std::vector<std::string> &names() const noexcept { return names_; }
    const std::optional<std::string> &no_finding() const noexcept { return no_finding_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }

    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(std::string_view name) const { return index_of(name).has_value(); }

    /// Answer used when no candidate is present.
    std::string empty_answer() const { return no_finding_.value_or("none"); }

    /// Members of `items` in vocabulary order, deduplicated. Throws InputError
    /// for items outside the vocabulary.
    std::vector<std::string> ordered(const std::vector<std::string> &items) const;

    friend bool operator==(const FindingVocabulary &, const FindingVocabulary &) = default;

  private:
    std::vector<std::string> names_;
    std::optional<std::string> no_finding_;
};

} // namespace cxrforge
