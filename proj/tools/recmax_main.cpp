// Command-line front end.  Everything below talks to the library through the
// C interface; exit codes are 0 success, 2 parse/config error, 3 runtime
// estimation error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recmax/recmax.h"

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void die(int code, const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  std::exit(code);
}

int exit_code(recmax_status s) { return s == RECMAX_EINVAL ? 2 : 3; }

void check(recmax_status s, const char* what) {
  if (s == RECMAX_OK) return;
  die(exit_code(s), std::string(what) + ": " + recmax_last_error());
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  explicit Handle(T* q) : p(q) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
  Handle& operator=(Handle&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~Handle() { Free(p); }
};
using ModelHandle = Handle<recmax_model, recmax_model_free>;
using CopulaHandle = Handle<recmax_copula, recmax_copula_free>;
using RngHandle = Handle<recmax_rng, recmax_rng_free>;
using JsonStr = Handle<char, recmax_string_free>;
using RowsBuf = Handle<double, recmax_rows_free>;

double parse_double(const std::string& token, const char* what) {
  const char* s = token.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') die(2, std::string(what) + ": bad number '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_vector(const std::string& text, const char* what) {
  if (text.empty()) die(2, std::string(what) + ": empty list");
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_double(tok, what));
  return out;
}

// Grid of points: ';' between points, ',' between coordinates.
std::vector<std::vector<double>> parse_grid(const std::string& text) {
  if (text.empty()) die(2, "grid: empty");
  std::vector<std::vector<double>> out;
  for (const auto& pt : split(text, ';')) {
    out.push_back(parse_vector(pt, "grid"));
    if (out.back().size() != out.front().size()) die(2, "grid: points differ in dimension");
  }
  return out;
}

std::vector<long long> parse_checkpoints(const std::string& text) {
  std::vector<long long> out;
  for (const auto& tok : split(text, ',')) {
    const char* s = tok.c_str();
    char* end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0') die(2, std::string("checkpoints: bad integer '") + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<long long> default_checkpoints(long long n) {
  std::vector<long long> ks;
  for (long long base = 1;; base *= 10) {
    for (long long step : {1, 2, 5}) {
      long long k = base * step;
      if (k > n) {
        if (ks.empty() || ks.back() != n) ks.push_back(n);
        return ks;
      }
      ks.push_back(k);
    }
  }
}

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt12(v).c_str(), nullptr);
}

ordered_json j12(double v) {
  if (std::isnan(v)) return nullptr;
  return round12(v);
}

ordered_json estimate_json(const recmax_estimate& e) {
  ordered_json j;
  j["value"] = j12(e.value);
  j["std_error"] = j12(e.std_error);
  j["n_samples"] = e.n_samples;
  j["method"] = e.method;
  j["seed"] = e.seed;
  if (e.bias_note[0] != '\0') j["bias_note"] = e.bias_note;
  if (e.has_divergence_flag) j["divergence_flag"] = e.divergence_flag != 0;
  return j;
}

void print_json(const ordered_json& j) {
  std::fputs(j.dump(2).c_str(), stdout);
  std::fputc('\n', stdout);
}

std::string model_descriptor(const recmax_model* m) {
  char buf[160];
  check(recmax_model_descriptor(m, buf, sizeof buf), "model descriptor");
  return buf;
}

std::string copula_descriptor(const recmax_copula* c) {
  char buf[160];
  check(recmax_copula_descriptor(c, buf, sizeof buf), "copula descriptor");
  return buf;
}

// json null cells (NaN upstream) print as "nan" in CSV.
std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_float()) return fmt12(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  return v.dump();
}

struct Opts {
  std::string model;
  std::string copula;
  std::string x;
  std::string u;
  std::string grid;
  std::string margins;
  std::string input;
  std::string out = "-";
  std::string what = "copula";
  std::string method = "all";
  std::string format;
  std::string checkpoints;
  long long n = 0;
  long long reps = 0;
  long long samples = 1000000;
  long long cap = 100000;
  unsigned long long seed = 1;
  int d = 2;
  int workers = 0;
};

ModelHandle open_model(const Opts& o, int fallback_dim) {
  ModelHandle m;
  check(recmax_model_parse(o.model.c_str(), fallback_dim, &m.p), "model");
  return m;
}

CopulaHandle open_copula(const Opts& o, int fallback_dim) {
  CopulaHandle c;
  check(recmax_copula_parse(o.copula.c_str(), fallback_dim, &c.p), "copula");
  return c;
}

/* ------------------------------------------------------------- commands */

void run_norm_dual(const Opts& o, bool dual) {
  auto xs = parse_vector(o.x, "--x");
  ModelHandle m = open_model(o, static_cast<int>(xs.size()));
  if (recmax_model_dim(m.p) != static_cast<int>(xs.size())) {
    die(2, "--x dimension does not match the model");
  }
  double v = 0.0;
  recmax_status s = dual ? recmax_dual(m.p, xs.data(), static_cast<int>(xs.size()), &v)
                         : recmax_norm(m.p, xs.data(), static_cast<int>(xs.size()), &v);
  check(s, dual ? "dual" : "norm");
  std::printf("%#.12g\n", v);
}

void run_concurrence(const Opts& o) {
  if (o.model.empty() && o.copula.empty()) die(2, "concurrence: needs --model or --copula");
  bool want_gen = o.method == "all" || o.method == "generator";
  bool want_eta = o.method == "all" || o.method == "eta";
  bool want_emp = o.method == "all" || o.method == "empirical";
  if (o.method != "all" && o.method != "generator" && o.method != "eta" &&
      o.method != "empirical") {
    die(2, "concurrence: --method must be generator, eta, empirical, or all");
  }

  ModelHandle m;
  if (!o.model.empty()) {
    check(recmax_model_parse(o.model.c_str(), o.d, &m.p), "model");
  } else if (want_gen || want_eta) {
    if (o.method == "all") {
      want_gen = want_eta = false;  // copula-only run: empirical route only
    } else {
      die(2, "concurrence: --method " + o.method + " needs --model");
    }
  }

  CopulaHandle c;
  if (!o.copula.empty()) {
    check(recmax_copula_parse(o.copula.c_str(), m.p ? recmax_model_dim(m.p) : o.d, &c.p),
          "copula");
  } else if (want_emp) {
    check(recmax_copula_msc(m.p, &c.p), "copula");
  }

  ordered_json config;
  config["subcommand"] = "concurrence";
  if (m.p) config["model"] = model_descriptor(m.p);
  if (c.p) config["copula"] = copula_descriptor(c.p);
  config["method"] = o.method;
  if (want_gen || want_eta) config["n_samples"] = o.samples;
  if (want_emp) {
    config["n"] = o.n;
    config["reps"] = o.reps;
  }
  config["seed"] = o.seed;

  ordered_json routes;
  if (want_gen) {
    recmax_estimate e;
    check(recmax_concurrence_via_generator(m.p, o.samples, o.seed, o.workers, &e), "generator");
    routes["generator"] = estimate_json(e);
  }
  if (want_eta) {
    recmax_estimate e;
    check(recmax_concurrence_via_eta(m.p, o.samples, o.seed, o.workers, &e), "eta");
    routes["eta"] = estimate_json(e);
  }
  if (want_emp) {
    if (o.n < 2 || o.reps < 1) die(2, "concurrence: empirical route needs --n >= 2 and --reps");
    recmax_estimate pn, npb;
    check(recmax_concurrence_empirical(c.p, o.n, o.reps, o.seed, o.workers, &pn, &npb),
          "empirical");
    ordered_json emp;
    emp["p_n"] = estimate_json(pn);
    emp["n_pi_bar"] = estimate_json(npb);
    routes["empirical"] = std::move(emp);
  }

  ordered_json out;
  out["config"] = std::move(config);
  if (m.p) {
    double cf = 0.0;
    recmax_status s = recmax_concurrence_closed_form(m.p, &cf);
    if (s == RECMAX_OK) {
      out["closed_form"] = j12(cf);
    } else if (s == RECMAX_ABSENT) {
      out["closed_form"] = nullptr;
    } else {
      check(s, "closed form");
    }
  }
  out["routes"] = std::move(routes);
  print_json(out);
}

void run_records_scan(const Opts& o) {
  if (o.input.empty()) die(2, "records scan: needs --input");
  RowsBuf rows;
  long long n = 0;
  int d = 0;
  check(recmax_read_rows(o.input.c_str(), &rows.p, &n, &d), "input");
  std::vector<double> transformed;
  const double* data = rows.p;
  if (!o.margins.empty()) {
    transformed.resize(static_cast<std::size_t>(n) * d);
    check(recmax_pit_transform(rows.p, n, d, o.margins.c_str(), transformed.data()), "margins");
    data = transformed.data();
  }
  JsonStr js;
  check(recmax_scan_rows_json(data, n, d, &js.p), "scan");

  ordered_json out;
  ordered_json config;
  config["subcommand"] = "records scan";
  config["input"] = o.input;
  if (!o.margins.empty()) config["margins"] = o.margins;
  out["config"] = std::move(config);
  out["summary"] = ordered_json::parse(js.p);
  print_json(out);
}

void run_records_simulate(const Opts& o) {
  if (o.copula.empty()) die(2, "records simulate: needs --copula");
  if (o.n < 1) die(2, "records simulate: needs --n >= 1");
  CopulaHandle c = open_copula(o, o.d);
  int d = recmax_copula_dim(c.p);
  RngHandle rng{recmax_rng_new(o.seed)};
  std::vector<double> buf(static_cast<std::size_t>(o.n) * d);
  check(recmax_copula_sample(c.p, rng.p, buf.data(), o.n), "sample");
  JsonStr js;
  check(recmax_scan_rows_json(buf.data(), o.n, d, &js.p), "scan");

  ordered_json out;
  ordered_json config;
  config["subcommand"] = "records simulate";
  config["copula"] = copula_descriptor(c.p);
  config["n"] = o.n;
  config["seed"] = o.seed;
  out["config"] = std::move(config);
  out["summary"] = ordered_json::parse(js.p);
  print_json(out);
}

void run_records_growth(const Opts& o) {
  if (o.copula.empty()) die(2, "records growth: needs --copula");
  if (o.n < 1) die(2, "records growth: needs --n >= 1");
  CopulaHandle c = open_copula(o, o.d);
  std::vector<long long> ks =
      o.checkpoints.empty() ? default_checkpoints(o.n) : parse_checkpoints(o.checkpoints);
  JsonStr js;
  check(recmax_expected_records_growth_json(c.p, o.n, o.reps, o.seed, o.workers, ks.data(),
                                            static_cast<int>(ks.size()), &js.p),
        "growth");
  ordered_json payload = ordered_json::parse(js.p);

  std::string format = o.format.empty() ? "csv" : o.format;
  if (format == "json") {
    ordered_json out;
    ordered_json config;
    config["subcommand"] = "records growth";
    config["copula"] = copula_descriptor(c.p);
    config["n"] = o.n;
    config["reps"] = o.reps;
    config["checkpoints"] = ks;
    config["seed"] = o.seed;
    out["config"] = std::move(config);
    out["rows"] = payload["rows"];
    print_json(out);
    return;
  }
  if (format != "csv") die(2, "records growth: --format must be csv or json");
  std::printf(
      "k,simple_mean,simple_se,complete_mean,complete_se,"
      "simple_ratio,simple_ratio_se,complete_ratio,complete_ratio_se\n");
  for (const auto& row : payload["rows"]) {
    std::printf("%lld,%s,%s,%s,%s,%s,%s,%s,%s\n", row["k"].get<long long>(),
                csv_cell(row["simple_mean"]).c_str(), csv_cell(row["simple_se"]).c_str(),
                csv_cell(row["complete_mean"]).c_str(), csv_cell(row["complete_se"]).c_str(),
                csv_cell(row["simple_ratio"]).c_str(), csv_cell(row["simple_ratio_se"]).c_str(),
                csv_cell(row["complete_ratio"]).c_str(),
                csv_cell(row["complete_ratio_se"]).c_str());
  }
}

void run_record_times(const Opts& o) {
  if (o.copula.empty()) die(2, "record-times: needs --copula");
  CopulaHandle c = open_copula(o, o.d);
  JsonStr js;
  check(recmax_expected_n2_json(c.p, o.samples, o.seed, o.workers, o.cap, &js.p), "record-times");
  ordered_json payload = ordered_json::parse(js.p);

  std::string format = o.format.empty() ? "json" : o.format;
  if (format == "csv") {
    std::printf("k,survival,se,count\n");
    for (const auto& row : payload["tail"]) {
      std::printf("%lld,%s,%s,%lld\n", row["k"].get<long long>(),
                  csv_cell(row["survival"]).c_str(), csv_cell(row["se"]).c_str(),
                  row["count"].get<long long>());
    }
    return;
  }
  if (format != "json") die(2, "record-times: --format must be csv or json");
  ordered_json out;
  ordered_json config;
  config["subcommand"] = "record-times";
  config["copula"] = copula_descriptor(c.p);
  config["n_samples"] = o.samples;
  config["cap"] = o.cap;
  config["seed"] = o.seed;
  out["config"] = std::move(config);
  for (auto& kv : payload.items()) out[kv.key()] = kv.value();
  print_json(out);
}

// Shared driver for the two limit-df commands; CSV rows are
// x1,...,xd,value,se over the requested grid.
void run_dist(const Opts& o, bool survival) {
  const char* name = survival ? "champion-dist" : "simple-dist";
  auto grid = parse_grid(o.grid);
  int d = static_cast<int>(grid.front().size());
  bool empirical = !o.copula.empty();
  if (empirical && (o.n < 4 || o.reps < 2)) {
    die(2, std::string(name) + ": empirical route needs --n >= 4 and --reps >= 2");
  }
  if (!empirical && o.model.empty()) {
    die(2, std::string(name) + ": needs --model or --copula");
  }

  std::vector<recmax_estimate> estimates(grid.size());
  ModelHandle m;
  CopulaHandle c;
  if (empirical) {
    check(recmax_copula_parse(o.copula.c_str(), d, &c.p), "copula");
    if (recmax_copula_dim(c.p) != d) die(2, "grid dimension does not match the copula");
    if (survival) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        check(recmax_champion_survival_empirical(c.p, grid[i].data(), d, o.n, o.reps, o.seed,
                                                 o.workers, &estimates[i]),
              name);
      }
    } else {
      std::vector<double> flat;
      for (const auto& pt : grid) flat.insert(flat.end(), pt.begin(), pt.end());
      check(recmax_simple_record_limit_df_empirical(c.p, flat.data(),
                                                    static_cast<int>(grid.size()), d, o.n, o.reps,
                                                    o.seed, o.workers, estimates.data()),
            name);
    }
  } else {
    check(recmax_model_parse(o.model.c_str(), d, &m.p), "model");
    if (recmax_model_dim(m.p) != d) die(2, "grid dimension does not match the model");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (survival) {
        check(recmax_champion_survival(m.p, grid[i].data(), d, o.samples, o.seed, o.workers,
                                       &estimates[i], nullptr, nullptr),
              name);
      } else {
        check(recmax_simple_record_limit_df(m.p, grid[i].data(), d, o.samples, o.seed, o.workers,
                                            &estimates[i]),
              name);
      }
    }
  }

  std::string format = o.format.empty() ? "csv" : o.format;
  if (format == "json") {
    ordered_json out;
    ordered_json config;
    config["subcommand"] = name;
    if (m.p) config["model"] = model_descriptor(m.p);
    if (c.p) config["copula"] = copula_descriptor(c.p);
    config["grid"] = grid;
    if (empirical) {
      config["n"] = o.n;
      config["reps"] = o.reps;
    } else {
      config["n_samples"] = o.samples;
    }
    config["seed"] = o.seed;
    out["config"] = std::move(config);
    ordered_json pts = ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ordered_json p;
      p["x"] = grid[i];
      p["estimate"] = estimate_json(estimates[i]);
      pts.push_back(std::move(p));
    }
    out["points"] = std::move(pts);
    print_json(out);
    return;
  }
  if (format != "csv") die(2, std::string(name) + ": --format must be csv or json");
  for (int i = 0; i < d; ++i) std::printf("x%d,", i + 1);
  std::printf("value,se\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double v : grid[i]) std::printf("%s,", fmt12(v).c_str());
    std::printf("%s,%s\n", fmt12(round12(estimates[i].value)).c_str(),
                fmt12(round12(estimates[i].std_error)).c_str());
  }
}

void run_chi_bar(const Opts& o) {
  if (o.copula.empty() == o.input.empty()) {
    die(2, "chi-bar: needs exactly one of --copula or --input");
  }
  auto us = parse_vector(o.u, "--u");
  JsonStr js;
  ordered_json config;
  config["subcommand"] = "chi-bar";
  if (!o.copula.empty()) {
    CopulaHandle c = open_copula(o, o.d);
    config["copula"] = copula_descriptor(c.p);
    config["u"] = us;
    config["n_samples"] = o.samples;
    config["seed"] = o.seed;
    check(recmax_chi_bar_json(c.p, us.data(), static_cast<int>(us.size()), o.samples, o.seed,
                              o.workers, &js.p),
          "chi-bar");
  } else {
    RowsBuf rows;
    long long n = 0;
    int d = 0;
    check(recmax_read_rows(o.input.c_str(), &rows.p, &n, &d), "input");
    std::string margins = o.margins.empty() ? "rank" : o.margins;
    std::vector<double> u(static_cast<std::size_t>(n) * d);
    check(recmax_pit_transform(rows.p, n, d, margins.c_str(), u.data()), "margins");
    config["input"] = o.input;
    config["margins"] = margins;
    config["u"] = us;
    check(recmax_chi_bar_rows_json(u.data(), n, d, us.data(), static_cast<int>(us.size()), &js.p),
          "chi-bar");
  }
  ordered_json payload = ordered_json::parse(js.p);

  std::string format = o.format.empty() ? "csv" : o.format;
  if (format == "json") {
    ordered_json out;
    out["config"] = std::move(config);
    out["rows"] = payload["rows"];
    print_json(out);
    return;
  }
  if (format != "csv") die(2, "chi-bar: --format must be csv or json");
  std::printf("u,chi_bar,se,exceedances,low_count\n");
  for (const auto& row : payload["rows"]) {
    std::printf("%s,%s,%s,%lld,%d\n", csv_cell(row["u"]).c_str(),
                csv_cell(row["chi_bar"]).c_str(), csv_cell(row["se"]).c_str(),
                row["exceedances"].get<long long>(), row["low_count"].get<bool>() ? 1 : 0);
  }
}

void run_sample(const Opts& o) {
  if (o.n < 1) die(2, "sample: needs --n >= 1");
  ModelHandle m;
  CopulaHandle c;
  int d = 0;
  if (o.what == "copula") {
    if (o.copula.empty()) die(2, "sample: --what copula needs --copula");
    c = open_copula(o, o.d);
    d = recmax_copula_dim(c.p);
  } else if (o.what == "generator" || o.what == "eta") {
    if (o.model.empty()) die(2, "sample: --what " + o.what + " needs --model");
    m = open_model(o, o.d);
    d = recmax_model_dim(m.p);
  } else {
    die(2, "sample: --what must be copula, generator, or eta");
  }
  RngHandle rng{recmax_rng_new(o.seed)};
  std::vector<double> buf(static_cast<std::size_t>(o.n) * d);
  if (o.what == "copula") {
    check(recmax_copula_sample(c.p, rng.p, buf.data(), o.n), "sample");
  } else if (o.what == "generator") {
    check(recmax_sample_generator(m.p, rng.p, buf.data(), o.n), "sample");
  } else {
    check(recmax_sample_eta(m.p, rng.p, buf.data(), o.n), "sample");
  }
  check(recmax_write_rows_csv(o.out.c_str(), buf.data(), o.n, d), "output");
}

/* -------------------------------------------------------------- parsing */

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Expands --args-from files (one flag per line, '#' comments) and fuses
// vector-valued flags with their argument so leading minus signs in values
// never look like new flags.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> raw;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--args-from") {
      if (i + 1 >= argc) die(2, "--args-from: missing file");
      path = argv[++i];
    } else if (a.rfind("--args-from=", 0) == 0) {
      path = a.substr(std::strlen("--args-from="));
    } else {
      raw.push_back(std::move(a));
      continue;
    }
    std::ifstream in(path);
    if (!in) die(2, "--args-from: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      std::size_t sp = line.find(' ');
      if (sp == std::string::npos) {
        raw.push_back(line);
      } else {
        raw.push_back(line.substr(0, sp));
        std::string rest = trim(line.substr(sp + 1));
        if (!rest.empty()) raw.push_back(rest);
      }
    }
  }

  std::vector<std::string> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& a = raw[i];
    if ((a == "--x" || a == "--u" || a == "--grid" || a == "--checkpoints") &&
        i + 1 < raw.size()) {
      out.push_back(a + "=" + raw[i + 1]);
      ++i;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Opts o;
  CLI::App app{"records and champions toolkit"};
  app.require_subcommand(1);

  auto add_model = [&](CLI::App* cmd) { cmd->add_option("--model", o.model, "model descriptor"); };
  auto add_copula = [&](CLI::App* cmd) {
    cmd->add_option("--copula", o.copula, "copula descriptor");
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "rng seed");
    cmd->add_option("--workers", o.workers, "worker threads (0 = RECMAX_WORKERS or hardware)");
    cmd->add_option("--d", o.d, "fallback dimension for descriptors without :d=");
  };

  auto* norm = app.add_subcommand("norm", "evaluate the model norm at x");
  add_model(norm);
  norm->add_option("--x", o.x, "comma-separated coordinates")->required();
  norm->callback([&] { run_norm_dual(o, false); });

  auto* dual = app.add_subcommand("dual", "evaluate the dual function at x");
  add_model(dual);
  dual->add_option("--x", o.x, "comma-separated coordinates")->required();
  dual->callback([&] { run_norm_dual(o, true); });

  auto* conc = app.add_subcommand("concurrence", "probability of concurrence estimators");
  add_model(conc);
  add_copula(conc);
  add_common(conc);
  conc->add_option("--method", o.method, "generator | eta | empirical | all");
  conc->add_option("--samples", o.samples, "Monte Carlo samples per route");
  conc->add_option("--n", o.n, "stream length for the empirical route")->default_val(1000);
  conc->add_option("--reps", o.reps, "streams for the empirical route")->default_val(10000);
  conc->callback([&] { run_concurrence(o); });

  auto* records = app.add_subcommand("records", "record scans and growth tables");
  records->require_subcommand(1);
  auto* scan = records->add_subcommand("scan", "scan a data file for records");
  scan->add_option("--input", o.input, "CSV/NDJSON file, '-' for stdin")->required();
  scan->add_option("--margins", o.margins, "margin specs for a PIT before scanning");
  scan->callback([&] { run_records_scan(o); });

  auto* simulate = records->add_subcommand("simulate", "simulate a stream and scan it");
  add_copula(simulate);
  add_common(simulate);
  simulate->add_option("--n", o.n, "stream length");
  simulate->callback([&] { run_records_simulate(o); });

  auto* growth = records->add_subcommand("growth", "expected record counts at checkpoints");
  add_copula(growth);
  add_common(growth);
  growth->add_option("--n", o.n, "stream length");
  growth->add_option("--reps", o.reps, "independent streams")->default_val(1000);
  growth->add_option("--checkpoints", o.checkpoints, "comma-separated checkpoint indices");
  growth->add_option("--format", o.format, "csv (default) or json");
  growth->callback([&] { run_records_growth(o); });

  auto* times = app.add_subcommand("record-times", "waiting-time tail for the second record");
  add_copula(times);
  add_common(times);
  times->add_option("--samples", o.samples, "Monte Carlo replications");
  times->add_option("--cap", o.cap, "direct-route truncation for N(2)");
  times->add_option("--format", o.format, "json (default) or csv tail table");
  times->callback([&] { run_record_times(o); });

  auto* champ = app.add_subcommand("champion-dist", "limit champion survival over an x-grid");
  add_model(champ);
  add_copula(champ);
  add_common(champ);
  champ->add_option("--grid", o.grid, "points: coords by ',', points by ';'")->required();
  champ->add_option("--samples", o.samples, "Monte Carlo samples per point");
  champ->add_option("--n", o.n, "stream length for the empirical route");
  champ->add_option("--reps", o.reps, "streams for the empirical route");
  champ->add_option("--format", o.format, "csv (default) or json");
  champ->callback([&] { run_dist(o, true); });

  auto* simple = app.add_subcommand("simple-dist", "limit simple-record df over an x-grid");
  add_model(simple);
  add_copula(simple);
  add_common(simple);
  simple->add_option("--grid", o.grid, "points: coords by ',', points by ';'")->required();
  simple->add_option("--samples", o.samples, "Monte Carlo samples per point");
  simple->add_option("--n", o.n, "stream length for the empirical route");
  simple->add_option("--reps", o.reps, "streams for the empirical route");
  simple->add_option("--format", o.format, "csv (default) or json");
  simple->callback([&] { run_dist(o, false); });

  auto* chibar = app.add_subcommand("chi-bar", "tail dependence measure on a u-grid");
  add_copula(chibar);
  add_common(chibar);
  chibar->add_option("--u", o.u, "comma-separated thresholds in (0,1)")->required();
  chibar->add_option("--samples", o.samples, "Monte Carlo samples");
  chibar->add_option("--input", o.input, "data file instead of a copula");
  chibar->add_option("--margins", o.margins, "margin specs for the PIT (default rank)");
  chibar->add_option("--format", o.format, "csv (default) or json");
  chibar->callback([&] { run_chi_bar(o); });

  auto* sample = app.add_subcommand("sample", "draw rows from a copula, generator, or eta");
  add_model(sample);
  add_copula(sample);
  add_common(sample);
  sample->add_option("--what", o.what, "copula (default) | generator | eta");
  sample->add_option("--n", o.n, "rows");
  sample->add_option("--out", o.out, "output CSV path, '-' for stdout");
  sample->callback([&] { run_sample(o); });

  std::vector<std::string> args = expand_args(argc, argv);
  try {
    // CLI11 consumes tokens from the back.
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
