// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace stylesplit;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Verdict flip_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t t = 1 + rng() % 2000;
    const auto a = random_set(t, 2, false, false, rng);
    const auto b = random_set(t, 2, k % 2 == 0, false, rng);
    worst = std::max(worst, std::abs(agreement(flip(a), b, t) - (1.0 - agreement(a, b, t))));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 5.0,
          "max error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Verdict matching_optimality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  int exact = 0, total = 0;
  for (const auto& [n, count] : {std::pair<std::size_t, int>{5, 200}, {7, 50}}) {
    for (int k = 0; k < count; ++k) {
      const std::size_t t = 200 + rng() % 800;
      const auto a = random_set(t, n, true, false, rng);
      const auto b = random_set(t, n, true, false, rng);
      const auto w = overlap_matrix(a, b, t);
      exact += assignment_value(w, max_weight_matching(w).map) == brute_assignment(w);
      ++total;
    }
  }
  const double secs = seconds_since(t0);
  return {exact == total && secs < 5.0,
          std::to_string(exact) + "/" + std::to_string(total) + " optimal, " + fmt("%.2f", secs) + " s"};
}

Verdict flip_solver_quality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  int exact = 0;
  double worst_ratio = 1.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t m = 4 + static_cast<std::size_t>(k) % 9;
    const auto a = random_agreements(m, rng);
    MaxCutOptions opt;
    opt.rounds = 1000;
    opt.seed = static_cast<std::uint64_t>(k);
    const double got = flip_objective(a, solve_flips_maxcut(a, opt));
    const double best = flip_objective(a, solve_flips_bruteforce(a));
    exact += got >= best - 1e-9;
    worst_ratio = std::min(worst_ratio, got / best);
  }
  const double secs = seconds_since(t0);
  return {exact >= 190 && worst_ratio >= 0.95 && secs < 60.0,
          std::to_string(exact) + "/200 at optimum, worst ratio " + fmt("%.4f", worst_ratio) + ", " +
              fmt("%.2f", secs) + " s"};
}

Verdict agreement_oracle() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t t = 1 + rng() % 1000, n = 2 + rng() % 5;
    const auto a = random_set(t, n, k % 4 == 0, k % 2 == 0, rng);
    const auto b = random_set(t, n, k % 3 == 0, k % 5 < 2, rng);
    worst = std::max(worst, std::abs(agreement(a, b, t) - brute_agreement(a, b, t)));
  }
  double worst_confusion = 0.0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t t = 2 + rng() % 1000;
    const auto a = random_set(t, 2, true, false, rng);
    auto b = a;
    for (auto& f : b.fragments) f.weights = random_weights(2, true, rng);
    worst_confusion = std::max(worst_confusion,
                               std::abs(binary_confusion_agreement(a, b, t) - agreement(a, b, t)));
  }
  return {worst <= 1e-10 && worst_confusion <= 1e-12,
          "sweep vs quadratic " + fmt("%.3g", worst) + ", confusion vs agreement " +
              fmt("%.3g", worst_confusion)};
}

Verdict parameter_arithmetic() {
  std::string raw;
  for (int i = 0; i < 3000; ++i) raw += "w ";
  const std::size_t m = make_fragment_sets(tokenize(raw), 1000, 50, 2).size();
  const std::size_t t = projection_dimension(0.2, 2.0, 2);
  GroundTruth one, two;
  one.spans = {{{0, 1800}, 0}, {{1800, 3726}, 1}};
  two.spans = {{{0, 1200}, 0}, {{1200, 2500}, 1}, {{2500, 3726}, 0}};
  const double b1 = agreement_upper_bound(one, 900, 3726);
  const double b2 = agreement_upper_bound(two, 900, 3726);
  return {m == 20 && t == 100 && std::abs(b1 - 0.8792) <= 1e-4 && std::abs(b2 - 0.7584) <= 1e-4,
          "m=" + std::to_string(m) + " t=" + std::to_string(t) + " bounds " + fmt("%.4f", b1) + ", " +
              fmt("%.4f", b2)};
}

struct Corpus {
  Text text = tokenize(read_fixture("interleaved_en.txt"));
  GroundTruth truth = io::truth_from_csv(read_fixture("interleaved_en_truth.csv"));
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

std::vector<AttributionResult> stylo_runs;

Verdict end_to_end_stylo() {
  const auto t0 = Clock::now();
  int good = 0;
  std::string scores;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PipelineConfig cfg;
    cfg.n = 2;
    cfg.fragment_size = 1000;
    cfg.step = 100;
    cfg.method = Method::stylo;
    cfg.align = AlignMode::maxcut;
    cfg.seed = seed;
    auto run = attribute(corpus().text, cfg);
    const double score = evaluate(run.result, corpus().truth);
    good += score >= 0.75 && score >= 1.4 * 0.5;
    scores += (scores.empty() ? "" : " ") + fmt("%.4f", score);
    stylo_runs.push_back(std::move(run.result));
  }
  const double secs = seconds_since(t0);
  return {good >= 4 && secs < 120.0,
          std::to_string(corpus().text.size()) + " words, agreement " + scores + ", " +
              fmt("%.1f", secs) + " s"};
}

Verdict ncd_path() {
  const Text& text = corpus().text;
  const DeflateCompressor c;
  const std::string x = fragment_text(text, {0, 1000}), y = fragment_text(text, {3000, 4000});
  const double xx = ncd(x, x, c), xy = ncd(x, y, c), yx = ncd(y, x, c);
  int good = 0;
  std::string scores;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PipelineConfig cfg;
    cfg.method = Method::ncd;
    cfg.seed = seed;
    cfg.threads = 4;
    const double score = evaluate(attribute(text, cfg).result, corpus().truth);
    good += score >= 0.65;
    scores += (scores.empty() ? "" : " ") + fmt("%.4f", score);
  }
  const bool sizes = x.size() >= 2048 && y.size() >= 2048;
  return {sizes && xx <= 0.15 && std::abs(xy - yx) <= 0.05 && good >= 3,
          "NCD(x,x)=" + fmt("%.4f", xx) + " |NCD(x,y)-NCD(y,x)|=" + fmt("%.4f", std::abs(xy - yx)) +
              ", agreement " + scores};
}

Verdict projection() {
  int same = 0;
  double plain_secs = 0.0, projected_secs = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(mix_seed(505, seed));
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(40, 500);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 500; ++j) x(i, j) = g(rng) + (i % 2 ? 1.0 : 0.0);
    }
    const ClusterParams p{.n = 2, .seed = seed};
    auto t0 = Clock::now();
    const auto plain = kmeans(x, p);
    plain_secs += seconds_since(t0);
    t0 = Clock::now();
    const auto projected = kmeans(random_project(x, 0.2, 2.0, 2, mix_seed(seed, 1)), p);
    projected_secs += seconds_since(t0);
    same += canonical(plain.labels) == canonical(projected.labels);
  }
  return {same >= 18 && projected_secs < plain_secs,
          std::to_string(same) + "/20 identical partitions, wall " + fmt("%.4f", projected_secs) +
              " s projected vs " + fmt("%.4f", plain_secs) + " s"};
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Verdict determinism() {
  const std::string base = std::string(STYLESPLIT_CLI) + " attribute --n 2 --fragment 1000 --step 100 --seed 9 --threads 4 " +
                           fixture_path("interleaved_en.txt") + " --truth " +
                           fixture_path("interleaved_en_truth.csv") + " 2>/dev/null";
  bool identical = true;
  std::size_t bytes = 0;
  for (const char* format : {"json", "svg"}) {
    int s1 = 0, s2 = 0;
    const std::string cmd = base + " --format " + format;
    const std::string a = capture(cmd, s1), b = capture(cmd, s2);
    identical = identical && s1 == 0 && s2 == 0 && !a.empty() && a == b;
    bytes += a.size();
  }
  return {identical, "JSON and SVG reruns byte-identical (" + std::to_string(bytes) + " bytes)"};
}

Verdict smoothness() {
  std::size_t checked = 0, smooth = 0;
  for (const auto& r : stylo_runs) {
    const double m = 10.0;  // L / s = 1000 / 100
    for (std::size_t k = 1; k < r.segments.size(); ++k) {
      bool ok = true;
      for (std::size_t i = 0; i < r.n; ++i) {
        ok = ok && std::abs(r.segments[k].weights[i] - r.segments[k - 1].weights[i]) <= 1.0 / m + 1e-12;
      }
      smooth += ok;
      ++checked;
    }
  }
  return {checked > 0 && smooth == checked,
          std::to_string(smooth) + "/" + std::to_string(checked) + " adjacent segment pairs within 1/m"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"flip identity", flip_identity},
      {"matching optimality", matching_optimality},
      {"flip solver quality", flip_solver_quality},
      {"agreement oracle equivalence", agreement_oracle},
      {"parameter arithmetic", parameter_arithmetic},
      {"end-to-end stylometric attribution", end_to_end_stylo},
      {"compression distance path", ncd_path},
      {"random projection", projection},
      {"determinism", determinism},
      {"transition smoothness", smoothness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
  return failed ? 1 : 0;
}
