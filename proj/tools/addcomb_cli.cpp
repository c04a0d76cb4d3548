// addcomb command-line front end.
// Exit codes: 0 success, 1 input error, 2 budget exhausted, 3 internal check failed.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "addcomb/addcomb.hpp"

namespace fs = std::filesystem;
using namespace addcomb;
using nlohmann::json;

namespace {

struct Globals {
  std::string out;
  std::uint64_t seed = 1;
  std::int64_t budgetMs = 0;
  std::string format = "json";
};

/// A JSON file path, or a built-in name: 3ap, 4ap, x+y-3z, pair:K.
LinearFormSystem resolveSystem(const std::string& name) {
  if (fs::exists(name)) return readSystemFile(name);
  if (name == "3ap") return systems::threeAP();
  if (name == "4ap") return systems::fourAP();
  if (name == "x+y-3z") return systems::xPlusYMinus3Z();
  if (name.rfind("pair:", 0) == 0) return systems::dependentPair(parseRational(name.substr(5)).convert_to<std::int64_t>());
  throw InputError("no such system file or built-in system '" + name + "' (built-ins: 3ap, 4ap, x+y-3z, pair:K)");
}

std::vector<LinearFormSystem> resolveFamily(const std::string& name) {
  if (!fs::exists(name)) return {resolveSystem(name)};
  std::ifstream in(name);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("invalid JSON in " + name + ": " + e.what());
  }
  if (j.is_object() && j.contains("forms")) return {LinearFormSystem::fromJson(j)};
  return familyFromJson(j);
}

SearchBudget budgetFrom(const Globals& g) {
  SearchBudget b;
  if (g.budgetMs > 0) b.timeLimit = std::chrono::milliseconds(g.budgetMs);
  return b;
}

void writeText(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) return;
  fs::create_directories(g.out);
  std::ofstream(fs::path(g.out) / name) << text;
}

/// Prints a JSON object, or a one-row CSV of its scalar fields, and mirrors it to --out.
void emit(const Globals& g, const json& j, const std::string& stem) {
  std::string text;
  if (g.format == "csv") {
    std::string head, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_structured()) continue;
      head += (head.empty() ? "" : ",") + it.key();
      row += (row.empty() ? "" : ",") + (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
    }
    text = head + "\n" + row + "\n";
  } else {
    text = j.dump(2) + "\n";
  }
  std::cout << text;
  writeText(g, stem + (g.format == "csv" ? ".csv" : ".json"), text);
}

json setJson(const SubsetOfZN& a) { return {{"N", a.modulus()}, {"members", a.members()}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solution counts, Gowers norms, extremal sets and periodic nilsequences over Z/N"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "directory for output files");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--budget-ms", g.budgetMs, "wall-clock budget in milliseconds (0: none)")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.fallthrough();

  // sol
  auto* sol = app.add_subcommand("sol", "solution measure of a set or function");
  std::string solSystem, solSet, solFunction;
  bool solFastFlag = false;
  sol->add_option("--system", solSystem, "form system (JSON file or built-in)")->required();
  auto* solSetOpt = sol->add_option("--set", solSet, "set file");
  auto* solFnOpt = sol->add_option("--function", solFunction, "function CSV");
  solSetOpt->excludes(solFnOpt);
  sol->add_flag("--fast", solFastFlag, "use the Fourier dual sum");

  // gowers
  auto* gow = app.add_subcommand("gowers", "Gowers uniformity norm");
  std::string gowSet, gowFunction;
  int gowD = 2;
  bool gowBalanced = false;
  auto* gowSetOpt = gow->add_option("--set", gowSet, "set file");
  auto* gowFnOpt = gow->add_option("--function", gowFunction, "function CSV");
  gowSetOpt->excludes(gowFnOpt);
  gow->add_option("--d", gowD, "degree")->capture_default_str();
  gow->add_flag("--balanced", gowBalanced, "use 1_A - density instead of 1_A");

  // min-sol / max-sol
  std::string mmSystem, mmAlpha = "0.4";
  std::int64_t mmN = 13;
  bool mmExact = false, mmHeuristic = false;
  std::uint64_t mmIterations = 200'000;
  auto addExtremal = [&](CLI::App* c) {
    c->add_option("--system", mmSystem, "form system")->required();
    c->add_option("--alpha", mmAlpha, "density (decimal or p/q)")->capture_default_str();
    c->add_option("--n", mmN, "modulus")->required();
    auto* e = c->add_flag("--exact", mmExact, "exact branch and bound (default)");
    c->add_flag("--heuristic", mmHeuristic, "annealing")->excludes(e);
    c->add_option("--iterations", mmIterations, "annealing iterations")->capture_default_str();
  };
  auto* minSol = app.add_subcommand("min-sol", "m(alpha, N) = min Sol over |A| >= alpha N");
  addExtremal(minSol);
  auto* maxSolCmd = app.add_subcommand("max-sol", "M(alpha, N) = max Sol over |A| <= alpha N");
  addExtremal(maxSolCmd);

  // max-free
  auto* maxFree = app.add_subcommand("max-free", "largest density of a set free of a family");
  std::string mfFamily;
  std::int64_t mfN = 0;
  bool mfExact = false, mfHeuristic = false, mfRelaxed = false;
  std::uint64_t mfIterations = 2'000;
  maxFree->add_option("--family", mfFamily, "family JSON (array, {systems:[...]}, or one system)")->required();
  maxFree->add_option("--n", mfN, "modulus")->required();
  auto* mfe = maxFree->add_flag("--exact", mfExact, "exact branch and bound (default)");
  maxFree->add_flag("--heuristic", mfHeuristic, "iterated greedy")->excludes(mfe);
  maxFree->add_flag("--exclude-constant", mfRelaxed, "allow configurations whose coordinates all coincide");
  maxFree->add_option("--iterations", mfIterations, "heuristic iterations")->capture_default_str();

  // construct
  auto* construct = app.add_subcommand("construct", "explicit free-set constructions");
  construct->require_subcommand(1);
  std::int64_t cP = 0, cK = 2, cN = 0, cMaxDen = 64;
  int cD = 2;
  std::string cSystem;
  auto* weyl = construct->add_subcommand("weyl", "A = {x : x^d in I}");
  weyl->add_option("--p", cP, "prime")->required();
  weyl->add_option("--k", cK)->capture_default_str();
  weyl->add_option("--d", cD)->capture_default_str();
  auto* mult = construct->add_subcommand("mult", "coset construction with A and kA disjoint");
  mult->add_option("--p", cP, "prime")->required();
  mult->add_option("--k", cK)->capture_default_str();
  auto* interval = construct->add_subcommand("interval", "densest verified free interval");
  interval->add_option("--system", cSystem, "non-invariant system")->required();
  interval->add_option("--n", cN, "modulus")->required();
  interval->add_option("--max-denominator", cMaxDen)->capture_default_str();

  // kernelize
  auto* kern = app.add_subcommand("kernelize", "integer kernel presentation of the image");
  std::string kSystem;
  kern->add_option("--system", kSystem, "form system")->required();

  // nil
  auto* nil = app.add_subcommand("nil", "polynomial sequences on filtered nilmanifolds");
  nil->require_subcommand(1);
  std::string nModel = "heisenberg-lcs", nVerify = "full";
  std::int64_t nQ = 227, nA = 3;
  int nLevel = 1;
  bool nComposite = false;
  auto* build = nil->add_subcommand("build-periodic", "q-periodic A-irrational polynomial");
  build->add_option("--model", nModel, "built-in model, torus:m=..,s=.., or JSON file")->capture_default_str();
  build->add_option("--q", nQ)->capture_default_str();
  build->add_option("--A", nA)->capture_default_str();
  build->add_option("--verify", nVerify)->check(CLI::IsMember({"none", "basic", "full"}))->capture_default_str();
  build->add_flag("--allow-composite", nComposite, "accept composite q with p_1(q) >= A");
  auto* chars = nil->add_subcommand("characters", "list level characters");
  chars->add_option("--model", nModel)->capture_default_str();
  chars->add_option("--level", nLevel)->capture_default_str();
  chars->add_option("--A", nA)->capture_default_str();
  auto* model = nil->add_subcommand("model", "print a model as JSON");
  model->add_option("--model", nModel)->capture_default_str();

  // scan
  auto* scan = app.add_subcommand("scan", "convergence scan over moduli");
  std::string sSystem, sQuantity = "m", sAlpha = "0.4", sName = "scan";
  std::vector<std::int64_t> sModuli;
  bool sExact = false, sHeuristic = false;
  std::uint64_t sIterations = 200'000;
  unsigned sThreads = 0;
  scan->add_option("--system", sSystem, "form system")->required();
  scan->add_option("--quantity", sQuantity, "m, M or d")->capture_default_str();
  scan->add_option("--alpha", sAlpha)->capture_default_str();
  scan->add_option("--moduli", sModuli, "comma-separated moduli")->delimiter(',');
  auto* se = scan->add_flag("--exact", sExact);
  scan->add_flag("--heuristic", sHeuristic)->excludes(se);
  scan->add_option("--iterations", sIterations)->capture_default_str();
  scan->add_option("--threads", sThreads)->capture_default_str();
  scan->add_option("--name", sName, "basename of the CSV/SVG files")->capture_default_str();

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "rerun an acceptance experiment");
  std::string rId;
  bool rList = false;
  repro->add_option("id", rId, "criterion id");
  repro->add_flag("--list", rList, "list criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sol->parsed()) {
      auto s = resolveSystem(solSystem);
      detail::require(!solSet.empty() || !solFunction.empty(), "sol needs --set or --function");
      CyclicFunction f = solSet.empty() ? readFunctionCsv(solFunction) : CyclicFunction::indicator(readSetFile(solSet));
      json j{{"system", s.toJson()}, {"N", f.modulus()}};
      if (solFastFlag) {
        auto v = solFast(f, s, kernelize(s));
        j["method"] = "fast";
        j["value"] = v.real();
        j["imag"] = v.imag();
      } else {
        auto v = solBrute(f, s);
        j["method"] = "brute";
        j["value"] = v.value.real();
        j["imag"] = v.value.imag();
        j["total"] = v.total;
        if (v.count) {
          j["count"] = *v.count;
          j["exact"] = toString(v.exact());
        }
      }
      emit(g, j, "sol");
    } else if (gow->parsed()) {
      detail::require(!gowSet.empty() || !gowFunction.empty(), "gowers needs --set or --function");
      CyclicFunction f = gowSet.empty() ? readFunctionCsv(gowFunction) : CyclicFunction::indicator(readSetFile(gowSet));
      if (gowBalanced) {
        const auto mean = f.mean();
        std::vector<std::complex<double>> v(f.values().begin(), f.values().end());
        for (auto& x : v) x -= mean;
        f = CyclicFunction(std::move(v));
      }
      emit(g, {{"N", f.modulus()}, {"d", gowD}, {"balanced", gowBalanced}, {"value", gowersNorm(f, gowD)}}, "gowers");
    } else if (minSol->parsed() || maxSolCmd->parsed()) {
      const bool isMin = minSol->parsed();
      auto s = resolveSystem(mmSystem);
      const Rational alpha = parseRational(mmAlpha);
      AnnealingOptions opt;
      opt.iterations = mmIterations;
      ExtremalResult r;
      if (mmHeuristic)
        r = isMin ? minSolHeuristic(s, alpha, mmN, g.seed, opt, budgetFrom(g))
                  : maxSolHeuristic(s, alpha, mmN, g.seed, opt, budgetFrom(g));
      else
        r = isMin ? minSolExact(s, alpha, mmN, budgetFrom(g)) : maxSolExact(s, alpha, mmN, budgetFrom(g));
      emit(g, r.toJson(), isMin ? "min-sol" : "max-sol");
    } else if (maxFree->parsed()) {
      auto fam = resolveFamily(mfFamily);
      const auto policy = mfRelaxed ? DegeneracyPolicy::excludeConstant : DegeneracyPolicy::strict;
      auto r = mfHeuristic ? maxFreeDensityHeuristic(fam, mfN, g.seed, mfIterations, policy, budgetFrom(g))
                           : maxFreeDensityExact(fam, mfN, policy, budgetFrom(g));
      emit(g, r.toJson(), "max-free");
    } else if (weyl->parsed()) {
      auto a = weylSet(cP, cK, cD);
      auto w = weylSetParameters(cP, cK, cD);
      json extra{{"delta", toString(w.delta)}, {"interval", {toString(w.lo), toString(w.hi)}}};
      const double alpha = toDouble(a.density());
      std::vector<double> bal(a.modulus(), -alpha);
      for (auto x : a.members()) bal[x] += 1;
      extra["u2Balanced"] = gowersNorm(CyclicFunction::fromReal(bal), 2);
      emit(g, constructionResult(a, {systems::dependentPair(cK)}, extra).toJson(), "construct-weyl");
    } else if (mult->parsed()) {
      auto a = multiplicativeFreeSet(cK, cP);
      json extra{{"order", mod(cK, cP) == cP - 1 ? 2 : multiplicativeOrder(mod(cK, cP), cP)}};
      emit(g, constructionResult(a, {systems::dependentPair(cK)}, extra).toJson(), "construct-mult");
    } else if (interval->parsed()) {
      auto s = resolveSystem(cSystem);
      auto r = intervalFreeSet(s, cN, cMaxDen);
      if (!r.set) {
        json j{{"value", nullptr}, {"method", "construction"}, {"boundKind", "lowerBound"}, {"verification", r.toJson()}};
        emit(g, j, "construct-interval");
      } else {
        emit(g, constructionResult(*r.set, {s}, r.toJson()).toJson(), "construct-interval");
      }
    } else if (kern->parsed()) {
      auto s = resolveSystem(kSystem);
      auto j = kernelize(s).toJson();
      j["system"] = s.toJson();
      emit(g, j, "kernelize");
    } else if (build->parsed()) {
      if (!nComposite)
        detail::require(isPrime(static_cast<std::uint64_t>(nQ)), "q must be prime (use --allow-composite to override)");
      auto m = models::byName(nModel);
      auto c = buildPeriodicIrrational(m, nQ, nA, g.seed);
      json j = c.toJson();
      if (nVerify != "none") {
        json v;
        v["periodicOn[-2q,2q]"] = verifyPeriodicity(c.g, nQ, 2 * nQ);
        v["irrational"] = isIrrational(c.g, nA).irrational;
        if (nVerify == "full") {
          json sums = json::array();
          auto cs = enumerateCharacters(*m, 1, nA);
          auto vals = characterSums(c.g, cs, nQ);
          for (std::size_t i = 0; i < cs.size(); ++i) {
            auto e = vals[i].toJson();
            e["k"] = cs[i].k;
            sums.push_back(e);
          }
          v["characterSums"] = sums;
          v["verticalSum"] = verticalSum(c.g, nQ).toJson();
        }
        j["verification"] = v;
      }
      emit(g, j, "nil-build-periodic");
    } else if (chars->parsed()) {
      auto m = models::byName(nModel);
      json list = json::array();
      for (const auto& xi : enumerateCharacters(*m, nLevel, nA)) list.push_back(xi.toJson());
      emit(g, {{"model", m->name()}, {"level", nLevel}, {"A", nA}, {"characters", list}}, "nil-characters");
    } else if (model->parsed()) {
      emit(g, models::byName(nModel)->toJson(), "nil-model");
    } else if (scan->parsed()) {
      auto s = resolveSystem(sSystem);
      ScanOptions opt;
      opt.mode = sHeuristic ? SolveMode::heuristic : SolveMode::exact;
      opt.seed = g.seed;
      opt.perModulus = budgetFrom(g);
      opt.annealing.iterations = sIterations;
      opt.threads = sThreads;
      auto rows = scanConvergence(s, parseQuantity(sQuantity), parseRational(sAlpha), sModuli, opt);
      const auto csv = scanCsv(rows);
      const auto svg = scanSvg(rows, (s.name().empty() ? std::string("system") : s.name()) + ": " + sQuantity +
                                         " (alpha = " + sAlpha + ")");
      if (g.format == "csv") {
        std::cout << csv;
      } else {
        json j = json::array();
        for (const auto& r : rows) j.push_back(r.toJson());
        std::cout << j.dump(2) << "\n";
        writeText(g, sName + ".json", j.dump(2) + "\n");
      }
      writeText(g, sName + ".csv", csv);
      writeText(g, sName + ".svg", svg);
      bool anySkipped = false;
      for (const auto& r : rows) anySkipped = anySkipped || r.skipped;
      if (anySkipped) std::fprintf(stderr, "some moduli were skipped after exhausting their budget\n");
    } else if (repro->parsed()) {
      if (rList || rId.empty()) {
        for (const auto& id : criterionIds()) std::cout << id << "\n";
        return 0;
      }
      auto r = reproduce(rId, g.seed);
      const auto text = r.toJson().dump(2) + "\n";
      std::cout << text;
      writeText(g, "report-" + rId + ".json", text);
      return r.pass ? 0 : 1;
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "budget exceeded: %s\n", e.what());
    return 2;
  } catch (const InternalError& e) {
    std::fprintf(stderr, "internal check failed: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
