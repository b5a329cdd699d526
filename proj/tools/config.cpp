#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "nsp/error.hpp"

namespace nsp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

const json& object(const json& doc, const std::string& where) {
  if (!doc.is_object()) fail(where + " must be an object");
  return doc;
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + "." + key + " must be finite");
  return x;
}

int integer(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool boolean(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string text(const json& obj, const std::string& key, const std::string& where,
                 const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

template <class T>
std::array<T, 3> triple(const json& obj, const std::string& key, const std::string& where,
                        std::array<T, 3> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) fail(where + "." + key + " must be an array of 3 entries");
  std::array<T, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const json& e = v.at(a);
    if constexpr (std::is_same_v<T, bool>) {
      if (!e.is_boolean()) fail(where + "." + key + " must hold booleans");
    } else if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) fail(where + "." + key + " must hold integers");
    } else {
      if (!e.is_number()) fail(where + "." + key + " must hold numbers");
    }
    out[a] = e.get<T>();
  }
  return out;
}

DomainSpec parse_domain(const json& d) {
  object(d, "domain");
  const std::string kind = text(d, "kind", "domain", "");
  DomainSpec spec;
  if (kind == "annulus") {
    check_keys(d, "domain", {"kind", "r_inner", "r_outer", "nodes"});
    if (!d.contains("nodes")) fail("domain.nodes is required");
    spec = DomainSpec::annulus(number(d, "r_inner", "domain", 1.0), number(d, "r_outer", "domain", 2.0),
                               integer(d, "nodes", "domain", 0));
  } else if (kind == "box") {
    check_keys(d, "domain", {"kind", "lengths", "nodes", "walls"});
    if (!d.contains("nodes")) fail("domain.nodes is required");
    spec = DomainSpec::box(triple<double>(d, "lengths", "domain", {1.0, 1.0, 1.0}),
                           triple<int>(d, "nodes", "domain", {0, 0, 0}),
                           triple<bool>(d, "walls", "domain", {true, true, true}));
  } else {
    fail("domain.kind must be 'annulus' or 'box'");
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(std::string("domain: ") + e.what());
  }
  return spec;
}

}  // namespace

bool known_experiment(const std::string& name) {
  return name == "steady" || name == "evolve" || name == "decay" || name == "verify-elliptic" ||
         name == "geometry-check";
}

RunConfig parse_config(const json& doc) {
  object(doc, "config");
  check_keys(doc, "config",
             {"schema_version", "experiment", "domain", "physics", "background", "initial", "scheme",
              "fit", "verify", "output", "seed"});
  if (!doc.contains("schema_version")) fail("schema_version is required");
  if (integer(doc, "schema_version", "config", 0) != kSchemaVersion)
    fail("unsupported schema_version (expected 1)");

  RunConfig c;
  c.experiment = text(doc, "experiment", "config", "");
  if (!c.experiment.empty() && !known_experiment(c.experiment))
    fail("unknown experiment '" + c.experiment + "'");

  if (!doc.contains("domain")) fail("domain is required");
  c.domain = parse_domain(doc.at("domain"));

  if (doc.contains("physics")) {
    const json& p = object(doc.at("physics"), "physics");
    check_keys(p, "physics", {"gamma", "mu", "lambda"});
    c.gamma = number(p, "gamma", "physics", c.gamma);
    c.mu = number(p, "mu", "physics", c.mu);
    c.lambda = number(p, "lambda", "physics", c.lambda);
  }
  if (!(c.mu > 0.0)) fail("physics.mu must be positive");
  if (!(c.lambda + 2.0 * c.mu / 3.0 >= 0.0)) fail("physics requires lambda + 2 mu / 3 >= 0");
  if (!(c.gamma >= 1.0)) fail("physics.gamma must be at least 1");

  if (doc.contains("background")) {
    const json& b = object(doc.at("background"), "background");
    check_keys(b, "background", {"profile", "base", "amplitude", "wavenumber", "centre", "width"});
    auto& bg = c.background;
    bg.profile = text(b, "profile", "background", bg.profile);
    bg.base = number(b, "base", "background", bg.base);
    bg.amplitude = number(b, "amplitude", "background", bg.amplitude);
    bg.wavenumber = integer(b, "wavenumber", "background", bg.wavenumber);
    bg.centre = triple<double>(b, "centre", "background", bg.centre);
    bg.width = number(b, "width", "background", bg.width);
  }
  {
    const auto& bg = c.background;
    if (bg.profile != "constant" && bg.profile != "mode" && bg.profile != "bump")
      fail("background.profile must be constant, mode or bump");
    if (!(bg.base > 0.0)) fail("background.base must be positive");
    if (bg.wavenumber < 1) fail("background.wavenumber must be at least 1");
    if (!(bg.width > 0.0)) fail("background.width must be positive");
  }

  if (doc.contains("initial")) {
    const json& i = object(doc.at("initial"), "initial");
    check_keys(i, "initial",
               {"family", "amplitude", "wavenumber", "centre", "width", "velocity_amplitude",
                "random_modes", "delta"});
    auto& ic = c.initial;
    ic.family = text(i, "family", "initial", ic.family);
    ic.amplitude = number(i, "amplitude", "initial", ic.amplitude);
    ic.wavenumber = integer(i, "wavenumber", "initial", ic.wavenumber);
    ic.centre = triple<double>(i, "centre", "initial", ic.centre);
    ic.width = number(i, "width", "initial", ic.width);
    ic.velocity_amplitude = number(i, "velocity_amplitude", "initial", ic.velocity_amplitude);
    ic.random_modes = integer(i, "random_modes", "initial", ic.random_modes);
    c.delta = number(i, "delta", "initial", c.delta);
  }
  {
    const auto& ic = c.initial;
    if (ic.family != "mode" && ic.family != "bump" && ic.family != "random" && ic.family != "zero")
      fail("initial.family must be mode, bump, random or zero");
    if (ic.wavenumber < 1) fail("initial.wavenumber must be at least 1");
    if (!(ic.width > 0.0)) fail("initial.width must be positive");
    if (ic.random_modes < 1) fail("initial.random_modes must be at least 1");
    if (!(c.delta > 0.0)) fail("initial.delta must be positive");
  }

  if (doc.contains("scheme")) {
    const json& s = object(doc.at("scheme"), "scheme");
    check_keys(s, "scheme", {"dt", "T", "stride", "linearized", "cfl", "mass_smoothing"});
    auto& sp = c.scheme;
    sp.dt = number(s, "dt", "scheme", sp.dt);
    sp.T = number(s, "T", "scheme", sp.T);
    sp.stride = integer(s, "stride", "scheme", sp.stride);
    sp.linearized = boolean(s, "linearized", "scheme", sp.linearized);
    sp.cfl = number(s, "cfl", "scheme", sp.cfl);
    sp.mass_smoothing = number(s, "mass_smoothing", "scheme", sp.mass_smoothing);
  }
  c.scheme.gamma = c.gamma;
  c.scheme.mu = c.mu;
  c.scheme.lambda = c.lambda;
  try {
    c.scheme.validate();
  } catch (const Error& e) {
    fail(std::string("scheme: ") + e.what());
  }

  if (doc.contains("fit")) {
    const json& f = object(doc.at("fit"), "fit");
    check_keys(f, "fit", {"t_min", "t_max"});
    if (f.contains("t_min")) c.fit_t_min = number(f, "t_min", "fit", 0.0);
    if (f.contains("t_max")) c.fit_t_max = number(f, "t_max", "fit", 0.0);
    if (c.fit_t_min && c.fit_t_max && !(*c.fit_t_min < *c.fit_t_max))
      fail("fit.t_min must be below fit.t_max");
  }

  if (doc.contains("verify")) {
    const json& v = object(doc.at("verify"), "verify");
    check_keys(v, "verify", {"samples"});
    c.verify_samples = integer(v, "samples", "verify", c.verify_samples);
  }
  if (c.verify_samples < 1) fail("verify.samples must be at least 1");

  if (doc.contains("output")) {
    const json& o = object(doc.at("output"), "output");
    check_keys(o, "output", {"dir", "fields"});
    c.out_dir = text(o, "dir", "output", c.out_dir.string());
    c.write_fields = boolean(o, "fields", "output", c.write_fields);
  }

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      fail("seed must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.initial.seed = c.seed;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json echo(const RunConfig& c) {
  json d;
  d["schema_version"] = kSchemaVersion;
  if (!c.experiment.empty()) d["experiment"] = c.experiment;
  if (c.domain.kind == DomainKind::Annulus) {
    d["domain"] = {{"kind", "annulus"},
                   {"r_inner", c.domain.r_inner},
                   {"r_outer", c.domain.r_outer},
                   {"nodes", c.domain.nodes[0]}};
  } else {
    d["domain"] = {{"kind", "box"},
                   {"lengths", c.domain.lengths},
                   {"nodes", c.domain.nodes},
                   {"walls", c.domain.walls}};
  }
  d["physics"] = {{"gamma", c.gamma}, {"mu", c.mu}, {"lambda", c.lambda}};
  const auto& bg = c.background;
  d["background"] = {{"profile", bg.profile},     {"base", bg.base},     {"amplitude", bg.amplitude},
                     {"wavenumber", bg.wavenumber}, {"centre", bg.centre}, {"width", bg.width}};
  const auto& ic = c.initial;
  d["initial"] = {{"family", ic.family},
                  {"amplitude", ic.amplitude},
                  {"wavenumber", ic.wavenumber},
                  {"centre", ic.centre},
                  {"width", ic.width},
                  {"velocity_amplitude", ic.velocity_amplitude},
                  {"random_modes", ic.random_modes},
                  {"delta", c.delta}};
  const auto& s = c.scheme;
  d["scheme"] = {{"dt", s.dt},   {"T", s.T},           {"stride", s.stride},
                 {"linearized", s.linearized}, {"cfl", s.cfl}, {"mass_smoothing", s.mass_smoothing}};
  json fit = json::object();
  if (c.fit_t_min) fit["t_min"] = *c.fit_t_min;
  if (c.fit_t_max) fit["t_max"] = *c.fit_t_max;
  d["fit"] = fit;
  d["verify"] = {{"samples", c.verify_samples}};
  d["output"] = {{"dir", c.out_dir.string()}, {"fields", c.write_fields}};
  d["seed"] = c.seed;
  return d;
}

}  // namespace nsp::cli
