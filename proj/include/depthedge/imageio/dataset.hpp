#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace depthedge::imageio {

// File naming inside a dataset directory (id = file name up to the first '.'):
//   <id>.pfm | <id>.pgm   depth
//   <id>.pbm              contour annotation
//   <id>.normals.pfm      normals
//   <id>.contours.pfm     contour probabilities

struct DatasetEntry {
  std::string id;
  std::filesystem::path pred_depth;
  std::filesystem::path gt_depth;
  std::optional<std::filesystem::path> gt_contours;
  std::optional<std::filesystem::path> gt_normals;
  std::optional<std::filesystem::path> pred_contours;
  std::optional<std::filesystem::path> pred_normals;
};

/// Files of one directory grouped by id.
struct DirectoryIndex {
  struct Files {
    std::optional<std::filesystem::path> depth;
    std::optional<std::filesystem::path> contours;
    std::optional<std::filesystem::path> normals;
    std::optional<std::filesystem::path> contour_probs;
  };
  std::vector<std::pair<std::string, Files>> items;  // sorted by id
  std::vector<std::string> problems;                 // duplicate ids and the like

  const Files* find(const std::string& id) const;
};

/// Throws IoError when `dir` is not a readable directory.
DirectoryIndex index_directory(const std::filesystem::path& dir);

struct DatasetPairing {
  std::vector<DatasetEntry> entries;    // sorted by id
  std::vector<std::string> unmatched;   // "<id>: ..." descriptions, sorted
};

/// Pairs prediction and ground-truth depth maps by id. Ground-truth
/// annotations (contours, normals) come from `gt_dir`; predicted contour
/// probabilities and normals from `pred_dir`. `annotations_dir`, when given,
/// overrides where contour annotations are looked up.
DatasetPairing pair_directories(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                                const std::optional<std::filesystem::path>& annotations_dir = std::nullopt);

}  // namespace depthedge::imageio
