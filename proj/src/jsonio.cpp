#include "cvnl/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "cvnl/symbol.hpp"
#include "json.hpp"

namespace cvnl::io {

using nj = nlohmann::json;

// ----------------------------------------------------------------- floats

std::string fmt17(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ----------------------------------------------------------- ordered JSON

Json Json::obj() {
  Json j;
  j.kind_ = Kind::object;
  return j;
}
Json Json::arr() {
  Json j;
  j.kind_ = Kind::array;
  return j;
}
Json Json::null() { return Json(); }
Json::Json(bool b) : kind_(Kind::bool_v), b_(b) {}
Json::Json(int v) : kind_(Kind::int_v), i_(v) {}
Json::Json(long long v) : kind_(Kind::int_v), i_(v) {}
Json::Json(std::uint64_t v) : kind_(Kind::uint_v), u_(v) {}
Json::Json(double v) : kind_(Kind::real_v), d_(v) {}
Json::Json(const char* s) : kind_(Kind::string_v), s_(s) {}
Json::Json(std::string s) : kind_(Kind::string_v), s_(std::move(s)) {}

Json& Json::set(const std::string& key, Json v) {
  if (kind_ != Kind::object) throw std::logic_error("set on non-object json");
  fields_.emplace_back(key, std::move(v));
  return *this;
}
Json& Json::push(Json v) {
  if (kind_ != Kind::array) throw std::logic_error("push on non-array json");
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void escape_to(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void pad(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent) * depth, ' ');
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::null_v: out += "null"; break;
    case Kind::bool_v: out += b_ ? "true" : "false"; break;
    case Kind::int_v: out += std::to_string(i_); break;
    case Kind::uint_v: out += std::to_string(u_); break;
    case Kind::real_v: out += fmt17(d_); break;
    case Kind::string_v: escape_to(out, s_); break;
    case Kind::array: {
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ',';
        pad(out, indent, depth + 1);
        items_[i].write(out, indent, depth + 1);
      }
      if (!items_.empty()) pad(out, indent, depth);
      out += ']';
      break;
    }
    case Kind::object: {
      out += '{';
      for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) out += ',';
        pad(out, indent, depth + 1);
        escape_to(out, fields_[i].first);
        out += indent < 0 ? ":" : ": ";
        fields_[i].second.write(out, indent, depth + 1);
      }
      if (!fields_.empty()) pad(out, indent, depth);
      out += '}';
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  return out;
}

// --------------------------------------------------------------- SHA-256

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
  return (x >> n) | (x << (32 - n));
}

void sha256_block(std::uint32_t h[8], const unsigned char* p) {
  std::uint32_t w[64];
  for (int i = 0; i < 16; ++i)
    w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
           (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
  for (int i = 16; i < 64; ++i) {
    std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
    std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
    w[i] = w[i - 16] + s0 + w[i - 7] + s1;
  }
  std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
  std::uint32_t e = h[4], f = h[5], g = h[6], k = h[7];
  for (int i = 0; i < 64; ++i) {
    std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    std::uint32_t ch = (e & f) ^ (~e & g);
    std::uint32_t t1 = k + s1 + ch + kSha256K[i] + w[i];
    std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    std::uint32_t t2 = s0 + maj;
    k = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  h[0] += a;
  h[1] += b;
  h[2] += c;
  h[3] += d;
  h[4] += e;
  h[5] += f;
  h[6] += g;
  h[7] += k;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  const unsigned char* data = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t n = bytes.size(), off = 0;
  for (; off + 64 <= n; off += 64) sha256_block(h, data + off);
  unsigned char tail[128] = {0};
  std::size_t rem = n - off;
  std::memcpy(tail, data + off, rem);
  tail[rem] = 0x80;
  std::size_t blocks = rem + 9 <= 64 ? 1 : 2;
  std::uint64_t bits = std::uint64_t(n) * 8;
  for (int i = 0; i < 8; ++i)
    tail[blocks * 64 - 1 - i] = static_cast<unsigned char>(bits >> (8 * i));
  sha256_block(h, tail);
  if (blocks == 2) sha256_block(h, tail + 64);
  char hex[65];
  for (int i = 0; i < 8; ++i) std::snprintf(hex + 8 * i, 9, "%08x", h[i]);
  return std::string(hex, 64);
}

// ---------------------------------------------------------- config parsing

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const nj& o, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) bad(path + "." + it.key(), "unknown field");
  }
}

double num_at(const nj& o, const std::string& path, const char* key, double def) {
  if (!o.contains(key)) return def;
  const nj& v = o.at(key);
  if (!v.is_number()) bad(path + "." + key, "expected a number");
  return v.get<double>();
}

int int_at(const nj& o, const std::string& path, const char* key, int def) {
  if (!o.contains(key)) return def;
  const nj& v = o.at(key);
  if (!v.is_number_integer()) bad(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string str_at(const nj& o, const std::string& path, const char* key,
                   const std::string& def) {
  if (!o.contains(key)) return def;
  const nj& v = o.at(key);
  if (!v.is_string()) bad(path + "." + key, "expected a string");
  return v.get<std::string>();
}

sim::GridSpec grid_at(const nj& o, const std::string& path, const char* key,
                      sim::GridSpec def) {
  if (!o.contains(key)) return def;
  const nj& v = o.at(key);
  if (!v.is_object()) bad(path + "." + key, "expected an object {n, L}");
  std::string p = path + "." + key;
  check_keys(v, p, {"n", "L"});
  sim::GridSpec g;
  g.n = int_at(v, p, "n", def.n);
  g.L = num_at(v, p, "L", def.L);
  return g;
}

sim::AncillaSpec ancilla_at(const nj& v, const std::string& path) {
  if (!v.is_object()) bad(path, "expected an object {order, chi, db}");
  check_keys(v, path, {"order", "chi", "db"});
  sim::AncillaSpec a;
  a.k = int_at(v, path, "order", 0);
  a.chi_k = num_at(v, path, "chi", 0.0);
  a.squeezing_db = num_at(v, path, "db", 0.0);
  return a;
}

}  // namespace

SimulateConfig parse_simulate_config(const std::string& text) {
  nj root;
  try {
    root = nj::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");
  const std::string path = "config";
  check_keys(root, path,
             {"gate", "chi", "carrier", "t0", "t4", "ancillas", "squeezing_db",
              "z", "grid", "carrier_grid", "trajectories", "seed", "sampling",
              "forced_outcomes", "keep_states", "sweep_db"});
  SimulateConfig out;
  circuits::CircuitConfig& c = out.circuit;
  c.gate = str_at(root, path, "gate", c.gate);
  c.chi = num_at(root, path, "chi", c.chi);
  c.t0 = num_at(root, path, "t0", c.t0);
  c.t4 = num_at(root, path, "t4", c.t4);
  c.squeezing_db = num_at(root, path, "squeezing_db", c.squeezing_db);
  if (root.contains("z")) {
    const nj& z = root.at("z");
    if (!z.is_null()) {
      if (!z.is_number()) bad(path + ".z", "expected a number or null");
      c.z = z.get<double>();
    }
  }
  c.grid = grid_at(root, path, "grid", c.grid);
  c.carrier_grid = grid_at(root, path, "carrier_grid", c.carrier_grid);
  if (root.contains("carrier"))
    c.carrier = ancilla_at(root.at("carrier"), path + ".carrier");
  else
    c.carrier.squeezing_db = c.squeezing_db;
  if (root.contains("ancillas")) {
    const nj& arr = root.at("ancillas");
    if (!arr.is_array()) bad(path + ".ancillas", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.ancillas.push_back(ancilla_at(
          arr[i], path + ".ancillas[" + std::to_string(i) + "]"));
  }
  c.trajectories = int_at(root, path, "trajectories", c.trajectories);
  if (root.contains("seed")) {
    const nj& s = root.at("seed");
    if (!s.is_number_unsigned())
      bad(path + ".seed", "expected a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.sampling = str_at(root, path, "sampling", c.sampling);
  if (root.contains("forced_outcomes")) {
    const nj& arr = root.at("forced_outcomes");
    if (!arr.is_array()) bad(path + ".forced_outcomes", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number())
        bad(path + ".forced_outcomes[" + std::to_string(i) + "]",
            "expected a number");
      c.forced_outcomes.push_back(arr[i].get<double>());
    }
  }
  if (root.contains("keep_states")) {
    const nj& v = root.at("keep_states");
    if (!v.is_boolean()) bad(path + ".keep_states", "expected a boolean");
    c.keep_states = v.get<bool>();
  }
  if (root.contains("sweep_db")) {
    const nj& arr = root.at("sweep_db");
    if (!arr.is_array()) bad(path + ".sweep_db", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number())
        bad(path + ".sweep_db[" + std::to_string(i) + "]", "expected a number");
      out.sweep_db.push_back(arr[i].get<double>());
    }
  }
  return out;
}

SimulateConfig load_simulate_config(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw ConfigError("cannot open config " + path);
  return parse_simulate_config(read_text_file(path));
}

gains::OutcomeVector parse_outcomes(const std::string& text) {
  nj root;
  try {
    root = nj::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("outcomes: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("outcomes: expected a JSON object");
  check_keys(root, "outcomes", {"q", "y"});
  gains::OutcomeVector o;
  if (root.contains("q")) {
    const nj& q = root.at("q");
    if (!q.is_object()) bad("outcomes.q", "expected an object of k -> value");
    for (auto it = q.begin(); it != q.end(); ++it) {
      int k = 0;
      try {
        k = std::stoi(it.key());
      } catch (...) {
        bad("outcomes.q." + it.key(), "key must be an integer order");
      }
      if (!it.value().is_number())
        bad("outcomes.q." + it.key(), "expected a number");
      o.q[k] = it.value().get<double>();
    }
  }
  if (root.contains("y")) {
    if (!root.at("y").is_number()) bad("outcomes.y", "expected a number");
    o.y = root.at("y").get<double>();
  }
  return o;
}

// --------------------------------------------------------------- emission

namespace {

Json grid_json(const sim::GridSpec& g) {
  return Json::obj().set("n", g.n).set("L", g.L);
}

Json ancilla_json(const sim::AncillaSpec& a) {
  return Json::obj().set("order", a.k).set("chi", a.chi_k).set("db", a.squeezing_db);
}

Json num_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json::null();
}

}  // namespace

std::string canonical_config(const SimulateConfig& c) {
  const circuits::CircuitConfig& cc = c.circuit;
  Json j = Json::obj();
  j.set("gate", cc.gate).set("chi", cc.chi);
  j.set("carrier", ancilla_json(cc.carrier));
  j.set("t0", cc.t0).set("t4", cc.t4);
  Json anc = Json::arr();
  for (const auto& a : cc.ancillas) anc.push(ancilla_json(a));
  j.set("ancillas", std::move(anc));
  j.set("squeezing_db", cc.squeezing_db);
  j.set("z", std::isnan(cc.z) ? Json::null() : Json(cc.z));
  j.set("grid", grid_json(cc.grid)).set("carrier_grid", grid_json(cc.carrier_grid));
  j.set("trajectories", cc.trajectories).set("seed", cc.seed);
  j.set("sampling", cc.sampling);
  Json fo = Json::arr();
  for (double v : cc.forced_outcomes) fo.push(Json(v));
  j.set("forced_outcomes", std::move(fo));
  Json sw = Json::arr();
  for (double v : c.sweep_db) sw.push(Json(v));
  j.set("sweep_db", std::move(sw));
  return j.dump();
}

Json trajectory_json(const circuits::TrajectoryRecord& r,
                     const std::string& gate, double squeezing_db) {
  Json j = Json::obj();
  j.set("index", r.index).set("squeezing_db", squeezing_db);
  Json oc = Json::arr();
  for (double v : r.outcomes) oc.push(Json(v));
  j.set("outcomes", std::move(oc));
  if (gate == "cubic") {
    j.set("chi2", r.chi2);
  } else {
    j.set("t3", r.t3).set("r3", r.r3).set("theta", r.theta);
    j.set("n_fine", r.n_fine);
  }
  j.set("p_disp", r.p_disp).set("fidelity", r.fidelity);
  j.set("mean_x", r.out_mean_x).set("var_x", r.out_var_x);
  j.set("mean_p", r.out_mean_p).set("var_p", r.out_var_p);
  j.set("resampled", r.resampled).set("boundary_warnings", r.boundary_warnings);
  return j;
}

Json summary_json(const SimulateConfig& c,
                  const std::vector<std::pair<double, circuits::RunResult>>& runs) {
  const circuits::CircuitConfig& cc = c.circuit;
  Json j = Json::obj();
  j.set("format", "cvnl-summary/1");
  j.set("tool_version", kToolVersion);
  j.set("config_hash", sha256_hex(canonical_config(c)));
  j.set("gate", cc.gate).set("chi", cc.chi);
  j.set("trajectories", cc.trajectories).set("seed", cc.seed);
  j.set("sampling", cc.sampling);
  j.set("grid", grid_json(cc.grid));
  if (cc.gate == "quartic") j.set("carrier_grid", grid_json(cc.carrier_grid));
  Json arr = Json::arr();
  for (const auto& [db, R] : runs) {
    Json row = Json::obj();
    row.set("squeezing_db", db);
    row.set("trajectories", (int)R.records.size());
    row.set("oracle_chi", R.oracle_chi);
    row.set("mean_fidelity", num_or_null(R.mean_fidelity));
    row.set("std_fidelity", num_or_null(R.std_fidelity));
    row.set("mean_var_x", num_or_null(R.mean_var_x));
    row.set("resampled", R.total_resampled);
    row.set("boundary_warnings", R.total_boundary_warnings);
    arr.push(std::move(row));
  }
  j.set("runs", std::move(arr));
  return j;
}

Json manifest_json(const SimulateConfig& c, std::uint64_t seed,
                   const std::string& created_utc,
                   const std::vector<std::string>& outputs) {
  Json j = Json::obj();
  j.set("format", "cvnl-manifest/1");
  j.set("tool_version", kToolVersion);
  j.set("created_utc", created_utc);
  j.set("seed", seed);
  j.set("config_hash", sha256_hex(canonical_config(c)));
  Json arr = Json::arr();
  for (const auto& p : outputs) arr.push(Json(p));
  j.set("outputs", std::move(arr));
  return j;
}

std::string csv_fidelity_vs_squeezing(
    const std::vector<std::pair<double, circuits::RunResult>>& runs) {
  std::string out =
      "squeezing_db,mean_fidelity,std_fidelity,mean_var_x,resampled,"
      "boundary_warnings\n";
  for (const auto& [db, R] : runs) {
    out += fmt17(db);
    out += ',';
    out += std::isfinite(R.mean_fidelity) ? fmt17(R.mean_fidelity) : "";
    out += ',';
    out += std::isfinite(R.std_fidelity) ? fmt17(R.std_fidelity) : "";
    out += ',';
    out += std::isfinite(R.mean_var_x) ? fmt17(R.mean_var_x) : "";
    out += ',';
    out += std::to_string(R.total_resampled);
    out += ',';
    out += std::to_string(R.total_boundary_warnings);
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------- symbolic output

namespace {

std::string rat_str(const algebra::Rat& r) {
  const auto& num = boost::multiprecision::numerator(r);
  const auto& den = boost::multiprecision::denominator(r);
  std::string s = num.str();
  if (den != 1) s += "/" + den.str();
  return s;
}

}  // namespace

Json poly_tree(const algebra::Poly& p) {
  Json terms = Json::arr();
  for (const auto& [mono, coeff] : p.terms()) {
    Json t = Json::obj();
    if (coeff.is_real()) {
      t.set("coeff", rat_str(coeff.re));
    } else {
      t.set("coeff",
            Json::obj().set("re", rat_str(coeff.re)).set("im", rat_str(coeff.im)));
    }
    Json factors = Json::arr();
    for (const auto& [s, e] : mono.f) {
      factors.push(
          Json::obj().set("symbol", algebra::sym_name(s)).set("power", e));
    }
    t.set("factors", std::move(factors));
    terms.push(std::move(t));
  }
  return Json::obj().set("sum", std::move(terms));
}

namespace {

Json cplx_json(std::complex<double> v) {
  if (v.imag() == 0.0) return Json(v.real());
  return Json::obj().set("re", v.real()).set("im", v.imag());
}

}  // namespace

Json gain_program_json(const gains::GainProgram& p) {
  Json j = Json::obj();
  j.set("format", "gain-program/1");
  j.set("order", p.N).set("scheme", p.scheme);
  j.set("target_chi", p.target_chi);
  j.set("convention", p.convention);
  j.set("all_real", p.all_real);
  if (p.first_complex_equation >= 0)
    j.set("first_complex_equation", p.first_complex_equation);
  Json steps = Json::arr();
  for (const auto& st : p.steps) {
    Json s = Json::obj();
    s.set("k", st.k).set("kind", st.kind).set("root_degree", st.root_degree);
    s.set("rhs", st.rhs.str());
    s.set("rhs_tree", poly_tree(st.rhs));
    s.set("value", cplx_json(st.value));
    if (st.kind == "ratio") s.set("t", cplx_json(st.t)).set("r", cplx_json(st.r));
    s.set("real", st.real);
    steps.push(std::move(s));
  }
  j.set("steps", std::move(steps));
  return j;
}

Json symbolic_report_json(const circuits::SymbolicReport& rep) {
  Json j = Json::obj();
  j.set("format", "certificate/1");
  j.set("order", rep.N).set("scheme", rep.scheme);
  j.set("residual_zero", rep.residual_zero);
  if (!rep.structural_ok.empty()) {
    Json s = Json::arr();
    for (bool b : rep.structural_ok) s.push(Json(b));
    j.set("structural_ok", std::move(s));
  }
  if (rep.scheme == "quartic-optical") {
    j.set("quartic_term_match", rep.quartic_term_match);
    j.set("cube_root_certified", rep.cube_root_certified);
  }
  j.set("final_relation", rep.final_relation);
  j.set("forward_residual", rep.forward_residual);
  j.set("pass", rep.pass);
  Json notes = Json::arr();
  for (const auto& n : rep.notes) notes.push(Json(n));
  j.set("notes", std::move(notes));
  j.set("program", gain_program_json(rep.program));
  return j;
}

// ------------------------------------------------------------ state files

void save_state(const std::string& path, const sim::ModeState& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write("CVNLSTAT", 8);
  std::uint32_t version = 1, n = static_cast<std::uint32_t>(s.grid.n);
  double L = s.grid.L;
  f.write(reinterpret_cast<const char*>(&version), 4);
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&L), 8);
  std::vector<float> buf(2 * s.amp.size());
  for (std::size_t i = 0; i < s.amp.size(); ++i) {
    buf[2 * i] = static_cast<float>(s.amp[i].real());
    buf[2 * i + 1] = static_cast<float>(s.amp[i].imag());
  }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw std::runtime_error("write failed: " + path);
}

sim::ModeState load_state(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[8];
  std::uint32_t version = 0, n = 0;
  double L = 0.0;
  f.read(magic, 8);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&L), 8);
  if (!f || std::memcmp(magic, "CVNLSTAT", 8) != 0)
    throw std::runtime_error(path + ": not a state container");
  if (version != 1)
    throw std::runtime_error(path + ": unsupported version " +
                             std::to_string(version));
  sim::ModeState s;
  s.grid = sim::GridSpec{static_cast<int>(n), L};
  s.grid.validate();
  std::vector<float> buf(2 * n);
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw std::runtime_error(path + ": truncated state container");
  s.amp.resize(n);
  for (std::uint32_t i = 0; i < n; ++i)
    s.amp[i] = {static_cast<double>(buf[2 * i]),
                static_cast<double>(buf[2 * i + 1])};
  return s;
}

// ------------------------------------------------------------------ misc

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string utc_timestamp_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cvnl::io
