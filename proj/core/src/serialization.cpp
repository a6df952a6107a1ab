#include "catchup/serialization.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "json.hpp"

namespace catchup::serialization {

using json = nlohmann::json;
using linalg::Matrix;
using linalg::SymmetricMatrix;

namespace {

json matrix_json(const Matrix& m) {
  json d = json::array();
  for (double v : m.data()) d.push_back(v);
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", d}};
}

json matrix_json(const SymmetricMatrix& m) { return matrix_json(m.to_matrix()); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Matrix matrix_from(const json& j, const std::string& what) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
      throw FormatError(what + ": data has " + std::to_string(data.size()) + " entries, expected " +
                        std::to_string(rows * cols));
    }
    return Matrix(rows, cols, std::move(data));
  } catch (const json::exception& e) {
    throw FormatError(what + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(what + ": " + e.what());
  }
}

SymmetricMatrix symmetric_from(const json& j, const std::string& what) {
  const Matrix m = matrix_from(j, what);
  if (!m.is_square()) throw FormatError(what + ": must be square");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r + 1; c < m.cols(); ++c)
      if (std::abs(m(r, c) - m(c, r)) > 1e-12 * (1.0 + std::abs(m(r, c)))) throw FormatError(what + ": not symmetric");
  return SymmetricMatrix::from_upper(m);
}

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double v : m.data()) {
      // Fold -0.0 into 0.0 so equal matrices hash equally.
      const double w = v == 0.0 ? 0.0 : v;
      std::uint64_t bits = 0;
      std::memcpy(&bits, &w, sizeof bits);
      u64(bits);
    }
  }
};

json vector_json(const linalg::Vector& v) { return json(v); }

}  // namespace

std::string model_to_json(const game::GameModel& m, int indent) {
  json blocks = json::array();
  for (const auto& b : m.blocks) {
    blocks.push_back({{"Q0", matrix_json(b.q0)},
                      {"S0", matrix_json(b.s0)},
                      {"R0", matrix_json(b.r0)},
                      {"Aq", matrix_json(b.aq_rows)},
                      {"G", matrix_json(b.g)}});
  }
  json j = {{"A", matrix_json(m.a)},     {"B1", matrix_json(m.b1)},   {"B2", matrix_json(m.b2)},
            {"H", matrix_json(m.h)},     {"Q1", matrix_json(m.q1)},   {"Q2", matrix_json(m.q2)},
            {"R11", matrix_json(m.r11)}, {"R22", matrix_json(m.r22)}, {"R12", matrix_json(m.r12)},
            {"R21", matrix_json(m.r21)}, {"blocks", blocks}};
  return j.dump(indent);
}

game::GameModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("game document is not valid JSON: ") + e.what());
  }
  game::GameModel m;
  m.a = matrix_from(field(j, "A"), "A");
  m.b1 = matrix_from(field(j, "B1"), "B1");
  m.b2 = matrix_from(field(j, "B2"), "B2");
  m.h = matrix_from(field(j, "H"), "H");
  m.q1 = symmetric_from(field(j, "Q1"), "Q1");
  m.q2 = symmetric_from(field(j, "Q2"), "Q2");
  m.r11 = symmetric_from(field(j, "R11"), "R11");
  m.r22 = symmetric_from(field(j, "R22"), "R22");
  m.r12 = symmetric_from(field(j, "R12"), "R12");
  m.r21 = symmetric_from(field(j, "R21"), "R21");
  const auto& blocks = field(j, "blocks");
  if (!blocks.is_array()) throw FormatError("'blocks' must be an array");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string tag = "blocks[" + std::to_string(k) + "].";
    const auto& b = blocks[k];
    game::UncertaintyBlock u;
    u.q0 = symmetric_from(field(b, "Q0"), tag + "Q0");
    u.s0 = matrix_from(field(b, "S0"), tag + "S0");
    u.r0 = symmetric_from(field(b, "R0"), tag + "R0");
    u.aq_rows = matrix_from(field(b, "Aq"), tag + "Aq");
    u.g = matrix_from(field(b, "G"), tag + "G");
    m.blocks.push_back(std::move(u));
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return m;
}

std::string model_hash(const game::GameModel& m) {
  Fnv f;
  for (const Matrix& x : {m.a, m.b1, m.b2, m.h}) f.matrix(x);
  for (const SymmetricMatrix* s : {&m.q1, &m.q2, &m.r11, &m.r22, &m.r12, &m.r21}) f.matrix(s->to_matrix());
  f.u64(m.blocks.size());
  for (const auto& b : m.blocks) {
    f.matrix(b.q0.to_matrix());
    f.matrix(b.s0);
    f.matrix(b.r0.to_matrix());
    f.matrix(b.aq_rows);
    f.matrix(b.g);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

std::string solution_to_json(const synthesis::GuaranteedSolution& sol, const game::GameModel& m,
                             std::span<const double> x0, int indent) {
  json players = json::array();
  for (int i = 0; i < 2; ++i) {
    players.push_back({{"K", matrix_json(sol.gains[i])},
                       {"Ptilde", matrix_json(sol.ptilde[i])},
                       {"P", matrix_json(sol.p[i])},
                       {"tau", vector_json(sol.multipliers[i].tau)},
                       {"nu", vector_json(sol.multipliers[i].nu)},
                       {"margin", sol.margins[i]},
                       {"guaranteed_cost", sol.cost(i + 1, x0)}});
  }
  json j = {{"model_hash", model_hash(m)},
            {"x0", linalg::Vector(x0.begin(), x0.end())},
            {"players", players},
            {"gain_residual", sol.gain_residual},
            {"closed_loop_spectral_radius", sol.closed_loop_radius},
            {"iterations", sol.iterations}};
  return j.dump(indent);
}

LoadedSolution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("solution document is not valid JSON: ") + e.what());
  }
  LoadedSolution out;
  try {
    out.model_hash = field(j, "model_hash").get<std::string>();
    out.x0 = field(j, "x0").get<linalg::Vector>();
    const auto& players = field(j, "players");
    if (!players.is_array() || players.size() != 2) throw FormatError("'players' must hold two entries");
    auto& s = out.solution;
    for (int i = 0; i < 2; ++i) {
      const auto& p = players[static_cast<std::size_t>(i)];
      const std::string tag = "players[" + std::to_string(i) + "].";
      s.gains[i] = matrix_from(field(p, "K"), tag + "K");
      s.ptilde[i] = symmetric_from(field(p, "Ptilde"), tag + "Ptilde");
      s.p[i] = symmetric_from(field(p, "P"), tag + "P");
      s.multipliers[i].tau = field(p, "tau").get<linalg::Vector>();
      s.multipliers[i].nu = field(p, "nu").get<linalg::Vector>();
      s.margins[i] = field(p, "margin").get<double>();
    }
    s.gain_residual = field(j, "gain_residual").get<double>();
    s.closed_loop_radius = field(j, "closed_loop_spectral_radius").get<double>();
    s.iterations = field(j, "iterations").get<int>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("solution document: ") + e.what());
  }
  return out;
}

}  // namespace catchup::serialization
