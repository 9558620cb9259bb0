#include "cxrforge/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "cxrforge/error.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

FindingVocabulary FindingVocabulary::make(const std::vector<std::string> &names, std::optional<std::string> no_finding) {
    FindingVocabulary v;
    std::set<std::string> seen;
    for (const auto &n : names) {
        std::string name = text::to_lower(text::trim(n));
        if (name.empty()) throw InputError("vocabulary entries must be non-empty");
        if (name.find(',') != std::string::npos || name.find(';') != std::string::npos)
            throw InputError("vocabulary entry '" + name + "' must not contain ',' or ';'");
        if (!seen.insert(name).second) throw InputError("duplicate vocabulary entry '" + name + "'");
        v.names_.push_back(std::move(name));
    }
    if (no_finding) {
        std::string nf = text::to_lower(text::trim(*no_finding));
        if (!seen.count(nf)) throw InputError("no-finding entry '" + nf + "' is not in the vocabulary");
        v.no_finding_ = std::move(nf);
    }
    return v;
}

std::optional<std::size_t> FindingVocabulary::index_of(std::string_view name) const {
    const std::string key = text::to_lower(text::trim(name));
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == key) return i;
    return std::nullopt;
}

std::vector<std::string> FindingVocabulary::ordered(const std::vector<std::string> &items) const {
    std::vector<bool> present(names_.size(), false);
    for (const auto &item : items) {
        const auto idx = index_of(item);
        if (!idx) throw InputError("'" + item + "' is not in the finding vocabulary");
        present[*idx] = true;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (present[i]) out.push_back(names_[i]);
    return out;
}

} // namespace cxrforge
