#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvnl/circuits.hpp"
#include "cvnl/gains.hpp"
#include "cvnl/polynomial.hpp"
#include "cvnl/statesim.hpp"

// Emission side of the artifact plumbing. Output files must be byte-identical
// across reruns and thread counts, so emission goes through a small ordered
// writer with one fixed float format instead of a general serializer; config
// parsing uses the vendored nlohmann header (see src/jsonio.cpp).
namespace cvnl::io {

inline constexpr const char* kToolVersion = "cvnl 0.1.0";

// The one float format of every emitted file: 17 significant digits.
// Throws on non-finite input; absent optional values serialize as null.
std::string fmt17(double v);

// Ordered JSON value: objects keep insertion order.
class Json {
 public:
  Json() = default;
  static Json obj();
  static Json arr();
  static Json null();
  Json(bool b);
  Json(int v);
  Json(long long v);
  Json(std::uint64_t v);
  Json(double v);
  Json(const char* s);
  Json(std::string s);

  Json& set(const std::string& key, Json v);  // object field, insertion order
  Json& push(Json v);                         // array element
  bool is_obj() const { return kind_ == Kind::object; }

  // indent < 0: compact single line (jsonl rows); otherwise pretty.
  std::string dump(int indent = -1) const;

 private:
  enum class Kind { null_v, bool_v, int_v, uint_v, real_v, string_v, array, object };
  Kind kind_ = Kind::null_v;
  bool b_ = false;
  long long i_ = 0;
  std::uint64_t u_ = 0;
  double d_ = 0.0;
  std::string s_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> fields_;
  void write(std::string& out, int indent, int depth) const;
};

// FIPS 180-4 SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simulation experiment = one circuit config plus an optional squeezing
// sweep; a non-empty sweep drives every ancilla (and the quartic carrier)
// through the listed dB values and emits fidelity_vs_squeezing.csv.
struct SimulateConfig {
  circuits::CircuitConfig circuit;
  std::vector<double> sweep_db;
};

// Strict parse: unknown keys and type mismatches throw ConfigError with the
// offending field path.
SimulateConfig parse_simulate_config(const std::string& text);
SimulateConfig load_simulate_config(const std::string& path);

// Reference outcomes for certify: {"q": {"2": -0.5, ...}, "y": 0.0}.
gains::OutcomeVector parse_outcomes(const std::string& text);

// Canonical physics-parameter serialization; its SHA-256 is the config hash
// recorded in the manifest and summary.
std::string canonical_config(const SimulateConfig& c);

Json trajectory_json(const circuits::TrajectoryRecord& r,
                     const std::string& gate, double squeezing_db);
Json summary_json(const SimulateConfig& c,
                  const std::vector<std::pair<double, circuits::RunResult>>& runs);
Json manifest_json(const SimulateConfig& c, std::uint64_t seed,
                   const std::string& created_utc,
                   const std::vector<std::string>& outputs);
std::string csv_fidelity_vs_squeezing(
    const std::vector<std::pair<double, circuits::RunResult>>& runs);

// Exact expression tree of a sparse polynomial: sum of terms, each a rational
// complex coefficient and a list of (symbol, power) factors.
Json poly_tree(const algebra::Poly& p);
Json gain_program_json(const gains::GainProgram& p);
Json symbolic_report_json(const circuits::SymbolicReport& rep);

// Flat binary state container: magic "CVNLSTAT", u32 version = 1, u32 n,
// f64 L, then n little-endian (float32 re, float32 im) pairs. Inspection
// artifact (single precision at the boundary), not a checkpoint.
void save_state(const std::string& path, const sim::ModeState& s);
sim::ModeState load_state(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
std::string utc_timestamp_now();

}  // namespace cvnl::io
