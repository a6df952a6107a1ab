#pragma once

// JSON documents for games and solutions.
//
// A matrix is {"rows": r, "cols": c, "data": [row-major entries]}. A game
// document names every matrix of GameModel; a solution document carries the
// hash of the game it was computed for.

#include <span>
#include <string>

#include "catchup/game.hpp"
#include "catchup/synthesis.hpp"

namespace catchup::serialization {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_to_json(const game::GameModel& m, int indent = 2);
/// Throws FormatError on malformed or inconsistent documents.
game::GameModel model_from_json(const std::string& text);

/// 64-bit FNV-1a over the dimensions and exact bit patterns of every model
/// matrix, as 16 hex digits.
std::string model_hash(const game::GameModel& m);

std::string solution_to_json(const synthesis::GuaranteedSolution& sol, const game::GameModel& m,
                             std::span<const double> x0, int indent = 2);

struct LoadedSolution {
  synthesis::GuaranteedSolution solution;
  std::string model_hash;
  linalg::Vector x0;
};

LoadedSolution solution_from_json(const std::string& text);

}  // namespace catchup::serialization
