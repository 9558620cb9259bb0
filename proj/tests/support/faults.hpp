#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fault {

/// Corruptions applied to a built corpus directory. Each one rewrites the
/// manifest digests so that only the injected defect remains.
enum class Kind { SlotMismatch, UnsortedIds, BlockedImage, InvalidBox, ManifestCount };

const std::vector<Kind> &all();
std::string_view name(Kind k);

/// Returns the sample id (or manifest entry path) the corruption targets.
std::string inject(const std::string &corpus_root, Kind k);

} // namespace fault
