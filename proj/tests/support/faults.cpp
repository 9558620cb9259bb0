#include "support/faults.hpp"

#include <filesystem>
#include <stdexcept>
#include <utility>

#include "cxrforge/corpus.hpp"
#include "cxrforge/hash.hpp"

namespace fault {

using namespace cxrforge;

const std::vector<Kind> &all() {
    static const std::vector<Kind> kinds{Kind::SlotMismatch, Kind::UnsortedIds, Kind::BlockedImage, Kind::InvalidBox,
                                         Kind::ManifestCount};
    return kinds;
}

std::string_view name(Kind k) {
    switch (k) {
    case Kind::SlotMismatch: return "slot/image mismatch";
    case Kind::UnsortedIds: return "unsorted ids";
    case Kind::BlockedImage: return "blocked image reference";
    case Kind::InvalidBox: return "invalid box";
    case Kind::ManifestCount: return "manifest record count";
    }
    return "?";
}

namespace {

std::string shard_for(Kind k) {
    switch (k) {
    case Kind::InvalidBox: return corpus_file_name(TaskId::PhraseGrounding, "ms-cxr");
    default: return corpus_file_name(TaskId::VisualQuestionAnswering, "mimic-cxr-vqa");
    }
}

void rewrite(const CorpusLayout &layout, const std::string &shard, const CorpusFile &file) {
    const std::string content = render_corpus(file.header, file.samples);
    write_file_atomic(layout.shard(shard), content);
    auto manifest = CorpusManifest::load(layout.manifest());
    for (auto &f : manifest.files)
        if (std::filesystem::path(f.path).filename() == shard) f.sha256 = sha256_hex(content);
    write_file_atomic(layout.manifest(), manifest.to_json());
}

} // namespace

std::string inject(const std::string &corpus_root, Kind k) {
    const CorpusLayout layout{corpus_root};
    const std::string shard = shard_for(k);
    if (k == Kind::ManifestCount) {
        auto manifest = CorpusManifest::load(layout.manifest());
        for (auto &f : manifest.files)
            if (std::filesystem::path(f.path).filename() == shard) ++f.records;
        write_file_atomic(layout.manifest(), manifest.to_json());
        return shard;
    }

    auto file = read_corpus(layout.shard(shard));
    if (file.samples.size() < 2) throw std::runtime_error(shard + " needs at least two samples");
    auto &s = file.samples.front();
    const std::string target = s.sample_id;
    switch (k) {
    case Kind::SlotMismatch: s.images.push_back(s.images.front()); break;
    case Kind::UnsortedIds: std::swap(file.samples[0], file.samples[1]); break;
    case Kind::BlockedImage: s.images.front().image_id = "m3a"; break;
    case Kind::InvalidBox:
        s.turns.back().content = "[80, 10, 20, 30]";
        s.fields["bbox"] = s.turns.back().content;
        break;
    case Kind::ManifestCount: break;
    }
    rewrite(layout, shard, file);
    return target;
}

} // namespace fault
