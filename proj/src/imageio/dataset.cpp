#include "depthedge/imageio/dataset.hpp"

#include <algorithm>
#include <map>

#include "depthedge/core/errors.hpp"

namespace fs = std::filesystem;

namespace depthedge::imageio {

const DirectoryIndex::Files* DirectoryIndex::find(const std::string& id) const {
  const auto it = std::lower_bound(items.begin(), items.end(), id,
                                   [](const auto& item, const std::string& key) { return item.first < key; });
  return (it != items.end() && it->first == id) ? &it->second : nullptr;
}

DirectoryIndex index_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

  std::map<std::string, DirectoryIndex::Files> by_id;
  DirectoryIndex out;
  auto assign = [&](std::optional<fs::path>& slot, const fs::path& p, const std::string& id) {
    if (slot) {
      // sorted scan below: keep the first, report the rest
      out.problems.push_back(id + ": ambiguous files " + slot->filename().string() + " and " +
                             p.filename().string());
      return;
    }
    slot = p;
  };

  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file()) files.push_back(e.path());
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  for (const fs::path& p : files) {
    const std::string name = p.filename().string();
    const std::size_t dot = name.find('.');
    if (dot == 0 || dot == std::string::npos) continue;
    const std::string id = name.substr(0, dot);
    const std::string suffix = name.substr(dot);
    DirectoryIndex::Files& f = by_id[id];
    if (suffix == ".pfm" || suffix == ".pgm")
      assign(f.depth, p, id);
    else if (suffix == ".pbm")
      assign(f.contours, p, id);
    else if (suffix == ".normals.pfm")
      assign(f.normals, p, id);
    else if (suffix == ".contours.pfm")
      assign(f.contour_probs, p, id);
  }
  for (auto& [id, f] : by_id) out.items.emplace_back(id, std::move(f));
  return out;
}

DatasetPairing pair_directories(const fs::path& pred_dir, const fs::path& gt_dir,
                                const std::optional<fs::path>& annotations_dir) {
  const DirectoryIndex pred = index_directory(pred_dir);
  const DirectoryIndex gt = index_directory(gt_dir);
  std::optional<DirectoryIndex> ann;
  if (annotations_dir) ann = index_directory(*annotations_dir);

  DatasetPairing out;
  for (const std::string& p : pred.problems) out.unmatched.push_back(p + " (in " + pred_dir.string() + ")");
  for (const std::string& p : gt.problems) out.unmatched.push_back(p + " (in " + gt_dir.string() + ")");

  for (const auto& [id, pf] : pred.items) {
    if (!pf.depth) continue;
    const DirectoryIndex::Files* gf = gt.find(id);
    if (!gf || !gf->depth) {
      out.unmatched.push_back(id + ": no ground-truth depth");
      continue;
    }
    DatasetEntry e;
    e.id = id;
    e.pred_depth = *pf.depth;
    e.gt_depth = *gf->depth;
    e.gt_normals = gf->normals;
    e.gt_contours = gf->contours;
    if (ann) {
      const DirectoryIndex::Files* af = ann->find(id);
      e.gt_contours = af ? af->contours : std::nullopt;
    }
    e.pred_contours = pf.contour_probs;
    e.pred_normals = pf.normals;
    out.entries.push_back(std::move(e));
  }
  for (const auto& [id, gf] : gt.items) {
    if (!gf.depth) continue;
    const DirectoryIndex::Files* pf = pred.find(id);
    if (!pf || !pf->depth) out.unmatched.push_back(id + ": no predicted depth");
  }
  std::sort(out.unmatched.begin(), out.unmatched.end());
  return out;
}

}  // namespace depthedge::imageio
