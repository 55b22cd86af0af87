#include "vfm/harness/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "vfm/fol/parser.hpp"

namespace vfm::harness {

using fol::Sentence;
using market::AgentSpec;
using market::ScriptEntry;

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits off the first whitespace-delimited word; rest keeps internal spacing.
std::pair<std::string, std::string> split_word(const std::string& s) {
  std::size_t sp = s.find_first_of(" \t");
  if (sp == std::string::npos) return {s, ""};
  return {s.substr(0, sp), strip(s.substr(sp + 1))};
}

std::uint64_t parse_nat(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    std::uint64_t n = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return n;
  } catch (const std::exception&) {
    fail(line, "expected a natural number, got '" + text + "'");
  }
}

Rat parse_rat(const std::string& text, std::size_t line) {
  std::optional<Rat> r = rat_from_string(text);
  if (!r) fail(line, "expected a rational, got '" + text + "'");
  return *r;
}

Sentence parse_sent(const std::string& text, std::size_t line) {
  try {
    return fol::parse_sentence(text);
  } catch (const fol::FolError& e) {
    fail(line, std::string("bad sentence: ") + e.what());
  }
}

struct AgentBlock {
  std::string tmpl, id;
  std::size_t line;
  std::map<std::string, std::pair<std::string, std::size_t>> kv;

  const std::pair<std::string, std::size_t>& need(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end())
      fail(line, "agent '" + id + "' (" + tmpl + ") is missing key '" + key + "'");
    return it->second;
  }
  bool has(const std::string& key) const { return kv.count(key) != 0; }
};

AgentSpec build_agent(const AgentBlock& b, const FuelPolicy& fuel) {
  Rat endow = parse_rat(b.need("endow").first, b.need("endow").second);
  std::uint64_t birthday =
      b.has("birthday") ? parse_nat(b.kv.at("birthday").first, b.kv.at("birthday").second) : 0;
  Sentence s = parse_sent(b.need("sentence").first, b.need("sentence").second);

  try {
    if (b.tmpl == "threshold-buyer") {
      Rat limit = parse_rat(b.need("buy-below").first, b.need("buy-below").second);
      game::InstaPlayer alpha = parse_player_spec(b.need("alpha").first);
      return threshold_buyer(b.id, endow, birthday, s, limit, alpha);
    }
    if (b.tmpl == "arbitrageur") {
      Rat x = parse_rat(b.need("x").first, b.need("x").second);
      Rat eps = parse_rat(b.need("eps").first, b.need("eps").second);
      return arbitrageur(b.id, endow, birthday, s, x, eps);
    }
    if (b.tmpl == "passive-holder") {
      Rat qty = parse_rat(b.need("quantity").first, b.need("quantity").second);
      return passive_holder(b.id, endow, birthday, s, qty);
    }
    if (b.tmpl == "adversary") {
      Rat limit = parse_rat(b.need("buy-below").first, b.need("buy-below").second);
      std::string spec = b.has("challenge") ? b.kv.at("challenge").first : "successor";
      return adversary(b.id, endow, birthday, s, limit, parse_player_spec(spec), fuel);
    }
    if (b.tmpl == "oscillator") {
      Rat limit = parse_rat(b.need("buy-below").first, b.need("buy-below").second);
      Rat qty = b.has("quantity") ? parse_rat(b.kv.at("quantity").first, b.kv.at("quantity").second)
                                  : Rat(1);
      return oscillator(b.id, endow, birthday, s, limit, qty);
    }
  } catch (const ConfigError& e) {
    fail(b.line, e.what());
  }
  fail(b.line, "unknown agent template '" + b.tmpl + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::vector<ScriptEntry> script;
  bool scripted = false;
  bool have_horizon = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  std::optional<AgentBlock> block;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(raw);
    if (line.empty() || line[0] == '#') continue;
    auto [word, rest] = split_word(line);

    if (block) {
      if (word == "end") {
        cfg.roster.push_back(build_agent(*block, cfg.fuel));
        block.reset();
      } else {
        if (rest.empty()) fail(lineno, "agent key '" + word + "' needs a value");
        block->kv[word] = {rest, lineno};
      }
      continue;
    }

    if (word == "horizon") {
      cfg.horizon = parse_nat(rest, lineno);
      if (cfg.horizon < 1) fail(lineno, "horizon must be at least 1");
      have_horizon = true;
    } else if (word == "seed") {
      cfg.seed = parse_nat(rest, lineno);
    } else if (word == "fuel") {
      auto [c, k] = split_word(rest);
      cfg.fuel.c = parse_nat(c, lineno);
      cfg.fuel.k = parse_nat(k, lineno);
    } else if (word == "window") {
      cfg.window = parse_rat(rest, lineno);
      if (cfg.window <= 0 || cfg.window > 1) fail(lineno, "window must be in (0,1]");
    } else if (word == "reality") {
      if (rest == "arithmetic") scripted = false;
      else if (rest == "scripted") scripted = true;
      else fail(lineno, "reality must be 'arithmetic' or 'scripted'");
    } else if (word == "reveal") {
      auto [t_text, rest2] = split_word(rest);
      auto [truth_text, sent_text] = split_word(rest2);
      ScriptEntry e;
      e.t = parse_nat(t_text, lineno);
      if (truth_text == "true") e.truth = true;
      else if (truth_text == "false") e.truth = false;
      else fail(lineno, "reveal truth must be 'true' or 'false'");
      e.sentence = parse_sent(sent_text, lineno);
      script.push_back(std::move(e));
    } else if (word == "sentence") {
      cfg.universe.push_back(parse_sent(rest, lineno));
    } else if (word == "agent") {
      auto [id, tmpl] = split_word(rest);
      if (id.empty() || tmpl.empty()) fail(lineno, "agent needs an id and a template");
      block = AgentBlock{tmpl, id, lineno, {}};
    } else if (word == "enumerate") {
      // template-family grid: k-th buyer plays the constant strategy {k}
      // with endowment budget / 2^k, honoring a finite endowment sum
      auto [count_text, rest2] = split_word(rest);
      auto [budget_text, sent_text] = split_word(rest2);
      std::uint64_t count = parse_nat(count_text, lineno);
      Rat budget = parse_rat(budget_text, lineno);
      Sentence s = parse_sent(sent_text, lineno);
      Rat e = budget / 2;
      for (std::uint64_t k = 1; k <= count; ++k, e /= 2) {
        game::InstaPlayer alpha = parse_player_spec("{" + std::to_string(k) + "}");
        cfg.roster.push_back(
            threshold_buyer("enum" + std::to_string(k), e, 0, s, Rat(1, 2), alpha));
      }
    } else {
      fail(lineno, "unknown directive '" + word + "'");
    }
  }
  if (block) fail(lineno, "agent '" + block->id + "' block not closed with 'end'");
  if (!have_horizon) throw ConfigError("config is missing 'horizon'");

  if (scripted) {
    try {
      cfg.reality = market::EmpiricalReality::scripted(script);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad revelation script: ") + e.what());
    }
  } else if (!script.empty()) {
    throw ConfigError("'reveal' lines require 'reality scripted'");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Convergence convergence_report(const std::vector<Rat>& series, const Rat& window) {
  if (series.empty()) throw std::invalid_argument("empty price series");
  if (window <= 0 || window > 1) throw std::invalid_argument("window must be in (0,1]");
  // trailing ceil(window * n) entries
  Rat scaled = window * static_cast<long>(series.size());
  Nat tail_n = scaled.get_num() / scaled.get_den();
  if (tail_n * scaled.get_den() != scaled.get_num()) tail_n += 1;
  std::size_t tail = tail_n.get_ui();
  if (tail < 1) tail = 1;
  std::size_t start = series.size() - tail;
  Rat lo = series[start], hi = series[start];
  for (std::size_t i = start; i < series.size(); ++i) {
    if (series[i] < lo) lo = series[i];
    if (series[i] > hi) hi = series[i];
  }
  return {hi - lo, series.back()};
}

RunArtifacts run_scenario(const ScenarioConfig& cfg) {
  market::MarketState m(cfg.roster, cfg.universe, cfg.reality);
  for (std::uint64_t i = 0; i < cfg.horizon; ++i) m.step();

  RunArtifacts out;
  out.prices_csv = m.price_csv();
  out.audit_log = m.audit_log();
  out.ledger_txt = m.ledger_dump();

  Rat cash_sum = 0, escrow = 0;
  for (const AgentSpec& a : m.roster()) cash_sum += m.cash(a.id);
  for (const auto& p : m.ledger()) escrow += p.quantity;
  bool conserved = cash_sum + escrow == m.injected();

  std::ostringstream r;
  r << "horizon " << cfg.horizon << "\n";
  r << "injected " << rat_to_string(m.injected()) << "\n";
  r << "conservation " << (conserved ? "ok" : "VIOLATED") << "\n";
  for (const Sentence& s : m.universe()) {
    std::vector<Rat> series;
    for (const auto& pp : m.history(s)) series.push_back(pp.price);
    Convergence c = series.empty() ? Convergence{Rat(0), m.price(s)}
                                   : convergence_report(series, cfg.window);
    r << "sentence " << fol::sentence_key(s) << " final " << rat_to_string(c.last)
      << " amplitude " << rat_to_string(c.amplitude) << "\n";
  }
  for (const AgentSpec& a : m.roster()) {
    const std::vector<Rat>& cs = m.cash_series(a.id);
    market::ExploitReport rep =
        cs.empty() ? market::ExploitReport{m.cash(a.id), m.cash(a.id), false}
                   : market::detect_exploitation(cs, Rat(0), m.injected());
    r << "agent " << a.id << " cash " << rat_to_string(m.cash(a.id)) << " min "
      << rat_to_string(rep.min) << " max " << rat_to_string(rep.max) << " exploit "
      << (rep.flagged ? "yes" : "no") << "\n";
  }
  out.report_txt = r.str();
  return out;
}

void write_artifacts(const RunArtifacts& a, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto emit = [&](const std::string& name, const std::string& body) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + name + " under " + dir);
    f << body;
  };
  emit("prices.csv", a.prices_csv);
  emit("audit.log", a.audit_log);
  emit("ledger.txt", a.ledger_txt);
  emit("report.txt", a.report_txt);
}

}  // namespace vfm::harness
