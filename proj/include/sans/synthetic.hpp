#pragma once
// Bundled 50-entity synthetic KG for tests and demos: two clusters of 25
// entities wired by intra-cluster "ring" and "chord" relations plus sparse
// "bridge" edges between clusters. Generation is deterministic, so the
// train/valid/test files are reproducible byte for byte.

#include <filesystem>
#include <vector>

#include "sans/graph.hpp"

namespace sans {

TripleStore make_synthetic_store();

// Writes train.txt / valid.txt / test.txt under dir (created if missing).
void write_synthetic_dataset(const std::filesystem::path& dir);

}  // namespace sans
