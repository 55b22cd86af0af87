#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vfm/fol/parser.hpp"
#include "vfm/game/game.hpp"
#include "vfm/garrabrant/garrabrant.hpp"
#include "vfm/harness/scenario.hpp"
#include "vfm/harness/templates.hpp"
#include "vfm/truth/truth.hpp"

namespace {

using namespace vfm;

int cmd_run(const std::string& config, const std::string& out_dir) {
  harness::ScenarioConfig cfg = harness::load_scenario(config);
  harness::RunArtifacts art = harness::run_scenario(cfg);
  harness::write_artifacts(art, out_dir);
  std::cout << art.report_txt;
  return 0;
}

int cmd_check(const std::string& sentence, std::uint64_t bound) {
  fol::Sentence s = fol::parse_sentence(sentence);
  fol::SentenceClass c = fol::classify(s);
  switch (c.kind) {
    case fol::ClassKind::Delta0: std::cout << "class Delta0\n"; break;
    case fol::ClassKind::Sigma: std::cout << "class Sigma " << c.level << "\n"; break;
    case fol::ClassKind::Pi: std::cout << "class Pi " << c.level << "\n"; break;
  }
  switch (truth::bounded_tarski(s, bound)) {
    case truth::ThreeVal::True: std::cout << "bounded(" << bound << ") true\n"; break;
    case truth::ThreeVal::False: std::cout << "bounded(" << bound << ") false\n"; break;
    case truth::ThreeVal::Unknown: std::cout << "bounded(" << bound << ") unknown\n"; break;
  }
  return 0;
}

int cmd_game(const std::string& sentence, const std::string& alpha_spec,
             const std::string& beta_spec, std::uint64_t fuel) {
  fol::Sentence s = fol::parse_sentence(sentence);
  game::InstaPlayer alpha = harness::parse_player_spec(alpha_spec);
  game::InstaPlayer beta = harness::parse_player_spec(beta_spec);
  game::GameOutcome o = game::playfull(s, alpha, beta, fuel);
  std::cout << game::transcript_to_string(o);
  if (o.resolved)
    std::cout << "resolved " << (o.truth ? "true" : "false") << ": "
              << fol::print(o.final_sentence) << "\n";
  else
    std::cout << "diverged: " << fol::print(o.final_sentence) << "\n";
  return 0;
}

// Baseline config, line-based:
//   horizon <T>
//   agent <id> <endow> <birthday>
//   theorem <t> <formula>
//   trade <t> <agent>
//     cash <rat>
//     stock <rat> <formula>
//   end
int cmd_gbase(const std::string& config) {
  std::ifstream in(config);
  if (!in) throw harness::ConfigError("cannot open config file: " + config);

  std::uint64_t horizon = 0;
  std::vector<garrabrant::GAgent> agents;
  std::vector<std::pair<std::uint64_t, garrabrant::PropPtr>> theorems;
  struct Trade {
    std::uint64_t t;
    std::string agent;
    garrabrant::GInventory inv;
  };
  std::vector<Trade> trades;
  Trade* open = nullptr;

  std::string raw;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw harness::ConfigError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::istringstream ls(raw);
    std::string word;
    if (!(ls >> word) || word[0] == '#') continue;
    try {
      if (open) {
        if (word == "end") {
          open = nullptr;
        } else if (word == "cash") {
          std::string v;
          ls >> v;
          auto r = rat_from_string(v);
          if (!r) fail("bad rational '" + v + "'");
          open->inv.cash += *r;
        } else if (word == "stock") {
          std::string v;
          ls >> v;
          auto r = rat_from_string(v);
          if (!r) fail("bad rational '" + v + "'");
          std::string rest;
          std::getline(ls, rest);
          open->inv.add(garrabrant::parse_prop(rest), *r);
        } else {
          fail("unknown trade key '" + word + "'");
        }
      } else if (word == "horizon") {
        ls >> horizon;
      } else if (word == "agent") {
        garrabrant::GAgent a;
        std::string endow;
        ls >> a.id >> endow >> a.birthday;
        auto r = rat_from_string(endow);
        if (a.id.empty() || !r) fail("agent needs: id endow birthday");
        a.endowment = *r;
        agents.push_back(std::move(a));
      } else if (word == "theorem") {
        std::uint64_t t;
        std::string rest;
        ls >> t;
        std::getline(ls, rest);
        theorems.emplace_back(t, garrabrant::parse_prop(rest));
      } else if (word == "trade") {
        Trade tr;
        if (!(ls >> tr.t >> tr.agent)) fail("trade needs: t agent");
        trades.push_back(std::move(tr));
        open = &trades.back();
      } else {
        fail("unknown directive '" + word + "'");
      }
    } catch (const garrabrant::GarrabrantError& e) {
      fail(e.what());
    }
  }
  if (open) fail("trade block not closed with 'end'");
  if (horizon < 1) throw harness::ConfigError("config is missing 'horizon'");

  std::stable_sort(theorems.begin(), theorems.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<garrabrant::PropPtr> known;
  std::size_t next_thm = 0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    while (next_thm < theorems.size() && theorems[next_thm].first <= t)
      known.push_back(theorems[next_thm++].second);
    for (auto& a : agents) {
      garrabrant::GInventory trade;
      for (const Trade& tr : trades)
        if (tr.t == t && tr.agent == a.id) trade = trade + tr.inv;
      bool nonempty = trade.cash != 0 || !trade.stock.empty();
      bool accepted = garrabrant::g_inventory_step(a, t, trade, known);
      if (nonempty)
        std::cout << "t=" << t << " agent=" << a.id << " trade="
                  << (accepted ? "accepted" : "rejected") << "\n";
    }
  }
  for (const auto& a : agents) {
    std::vector<Rat> vals = garrabrant::pc_valuations(a.inv, known);
    std::cout << "agent " << a.id << " cash " << rat_to_string(a.inv.cash);
    if (!vals.empty())
      std::cout << " min " << rat_to_string(vals.front()) << " max "
                << rat_to_string(vals.back());
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prediction markets over quantified sentences"};
  app.require_subcommand(1);

  std::string config, sentence, alpha_spec = "pass", beta_spec = "pass";
  std::string out_dir = "out";
  std::uint64_t bound = 10, fuel = 1000;

  CLI::App* run = app.add_subcommand("run", "run a market scenario");
  run->add_option("config", config, "scenario config file")->required();
  run->add_option("--out", out_dir, "artifact output directory");

  CLI::App* check = app.add_subcommand("check", "classify and bounded-evaluate a sentence");
  check->add_option("sentence", sentence, "sentence text")->required();
  check->add_option("--bound", bound, "variable bound");

  CLI::App* game = app.add_subcommand("game", "play a verification game");
  game->add_option("sentence", sentence, "sentence text")->required();
  game->add_option("--alpha", alpha_spec, "verifier strategy spec")->required();
  game->add_option("--beta", beta_spec, "falsifier strategy spec")->required();
  game->add_option("--fuel", fuel, "round and query budget");

  CLI::App* gbase = app.add_subcommand("gbase", "run the propositional baseline");
  gbase->add_option("config", config, "baseline config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config, out_dir);
    if (check->parsed()) return cmd_check(sentence, bound);
    if (game->parsed()) return cmd_game(sentence, alpha_spec, beta_spec, fuel);
    if (gbase->parsed()) return cmd_gbase(config);
  } catch (const vfm::market::InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
