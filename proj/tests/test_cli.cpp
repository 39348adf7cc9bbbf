#include <cmath>
#include <regex>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "rcsc/runner.hpp"

using namespace rcsc;

namespace {

const std::string kMoments = R"([run]
task = moments
seed = 9

[space]
kind = box
bounds = 0 1, 0 1

[system]
name = constant
alpha = 2
p = 0.3 0.5

[model]
beta = 6

[moments]
replicates = 200
min_samples = 1000
max_samples = 4000
)";

const std::string kDisk = R"([run]
task = sample
seed = 4

[space]
kind = disk
radius = 2.5

[system]
name = hyperbolic_geometric
alpha = 2
r = 0.5
q = 0.5

[model]
beta = 20
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos == std::string::npos) throw std::logic_error("pattern not found: " + from);
  return s.replace(pos, from.size(), to);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::pair<double, double>> polyline(const std::string& svg, const std::string& cls) {
  std::vector<std::pair<double, double>> out;
  const auto start = svg.find("class=\"" + cls + "\" points=\"");
  if (start == std::string::npos) return out;
  const auto open = svg.find("points=\"", start) + 8;
  std::istringstream in(svg.substr(open, svg.find('"', open) - open));
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return out;
}

}  // namespace

TEST(Config, ParsesDefaultsAndOverrides) {
  const auto c = parse_config(kMoments);
  EXPECT_EQ(c.task, Task::Moments);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.a.a, (std::vector<double>{1.0, -1.0, 1.0}));
  EXPECT_EQ(c.moment_replicates, 200u);
  EXPECT_EQ(c.integration.seed, 9u);

  Overrides o;
  o.seed = "0x10";
  o.task = "gamma";
  o.out = "elsewhere";
  o.threads = 3;
  const auto d = parse_config(kMoments, o);
  EXPECT_EQ(d.seed, 16u);
  EXPECT_EQ(d.task, Task::Gamma);
  EXPECT_EQ(d.out, "elsewhere");
  EXPECT_EQ(d.threads, 3);
  EXPECT_EQ(d.text, kMoments);
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(parse_config(replace(kMoments, "name = constant", "name = bogus")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "beta = 6", "beta = -6")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "beta = 6", "beta = six")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "beta = 6", "beta = 6\ngamma = 1")), ConfigError);
  EXPECT_THROW(parse_config(kMoments + "[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "seed = 9", "seed = -9")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "p = 0.3 0.5", "p = 0.3 1.5")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "p = 0.3 0.5", "p = 0.3")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "beta = 6", "beta = 6\na = 1 -1")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "replicates = 200", "replicates = 1")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "bounds = 0 1, 0 1", "bounds = 1 0, 0 1")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "task = moments", "task = render")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "task = moments", "task = clt")), ConfigError);
  EXPECT_THROW(parse_config(replace(kDisk, "name = hyperbolic_geometric", "name = cech")), ConfigError);
  EXPECT_THROW(parse_config(replace(kMoments, "name = constant", "name = hyperbolic_line")), ConfigError);
  Overrides o;
  o.task = "plot";
  EXPECT_THROW(parse_config(kMoments, o), ConfigError);
}

TEST(Config, CltLadderChecks) {
  const auto clt = replace(kMoments, "task = moments", "task = clt") + "\n[clt]\nladder = 5 20\n";
  EXPECT_EQ(parse_config(clt).ladder, (std::vector<double>{5, 20}));
  EXPECT_THROW(parse_config(replace(clt, "ladder = 5 20", "ladder = 20 5")), ConfigError);
  EXPECT_THROW(parse_config(clt + "replicates = 999\n"), ConfigError);
  EXPECT_THROW(parse_config(clt + "regime = sideways\n"), ConfigError);
}

TEST(Config, DiscreteMarksAreValidated) {
  const std::string base = R"([space]
kind = stationary
bounds = 0 1
marks = discrete
mark_values = 1 2
mark_weights = 0.5 0.5

[system]
name = stationary
alpha = 1
)";
  const auto c = parse_config(base);
  ASSERT_TRUE(c.window().marks() != nullptr);
  EXPECT_THROW(parse_config(replace(base, "mark_weights = 0.5 0.5", "mark_weights = 0.5")), ConfigError);
  EXPECT_THROW(parse_config(replace(base, "marks = discrete", "marks = gaussian")), ConfigError);
}

TEST(Report, GitBlobHashMatchesGit) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Report, CsvFormatIsPinned) {
  Table t{"demo", {"name", "n", "value"}, {}};
  t.add({"a", std::int64_t{3}, 0.1});
  t.add({"b", std::int64_t{-1}, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_EQ(to_csv(t), "# rcsc-csv v1 demo\nname,n,value\na,3,1.000000000000e-01\nb,-1,nan\n");
  EXPECT_THROW(t.add({"short"}), std::logic_error);
}

TEST(Report, ManifestEchoesConfig) {
  Manifest m{"[run]\nseed = 3\n", 3, "sample", {"points.csv abc"}};
  const auto text = to_text(m);
  EXPECT_NE(text.find("seed: 3\n"), std::string::npos);
  EXPECT_NE(text.find("config-hash: " + git_blob_hash(m.config_text)), std::string::npos);
  EXPECT_NE(text.find("artifact: points.csv abc\n"), std::string::npos);
  EXPECT_NE(text.find("  [run]\n  seed = 3\n"), std::string::npos);
}

TEST(Render, EmptySampleIsCircleOnly) {
  const auto svg = render_disk({}, ComplexSample{});
  EXPECT_EQ(count(svg, "class=\"boundary\""), 1u);
  EXPECT_EQ(count(svg, "class=\""), 1u);
}

TEST(Render, DiameterIsStraightChord) {
  Point a, b;
  a.location = {1.5, 0.0};
  b.location = {1.5, M_PI};
  auto c = complex_from_generators(2, {{0, 1}}, 1);
  const auto svg = render_disk({a, b}, c);
  const auto pts = polyline(svg, "edge");
  ASSERT_EQ(pts.size(), static_cast<std::size_t>(kArcSamples + 1));
  for (const auto& p : pts) EXPECT_NEAR(p.second, 240.0, 1e-9);
  EXPECT_GT(pts.front().first, 240.0);
  EXPECT_LT(pts.back().first, 240.0);
}

TEST(Render, ArcsAreGeodesics) {
  const PoincarePoint a{0.3, 0.5}, b{-0.6, 0.1};
  const auto arc = geodesic_segment(a, b);
  ASSERT_GE(arc.size(), 17u);
  const double d = hyperbolic_distance(a, b);
  for (const auto& m : arc) EXPECT_NEAR(hyperbolic_distance(a, m) + hyperbolic_distance(m, b), d, 1e-9);
}

TEST(Render, OneFillPerTriangle) {
  const auto c = parse_config(kDisk);
  const auto arts = run_task(c);
  std::string svg, counts;
  for (const auto& [name, content] : arts.files) {
    if (name == "complex.svg") svg = content;
    if (name == "counts.csv") counts = content;
  }
  std::smatch m;
  ASSERT_TRUE(std::regex_search(counts, m, std::regex("\nf,2,(\\d+)\n")));
  const auto f2 = std::stoul(m[1]);
  EXPECT_GT(f2, 0u);
  EXPECT_EQ(count(svg, "class=\"triangle\""), f2);
  ASSERT_TRUE(std::regex_search(counts, m, std::regex("\nf,1,(\\d+)\n")));
  EXPECT_EQ(count(svg, "class=\"edge\""), std::stoul(m[1]));
}

TEST(Render, LineProcessDrawsOneArcPerPoint) {
  auto text = replace(replace(kDisk, "name = hyperbolic_geometric", "name = hyperbolic_line"), "task = sample", "task = render");
  const auto arts = run_task(parse_config(text));
  ASSERT_EQ(arts.files.size(), 2u);
  EXPECT_EQ(arts.files[0].first, "lines.svg");
  EXPECT_EQ(arts.files[1].first, "complex.svg");
  EXPECT_EQ(count(arts.files[0].second, "class=\"line\""), count(arts.files[1].second, "class=\"vertex\""));
}

TEST(Runner, MomentsReportsAreThreadIndependent) {
  Overrides o;
  o.threads = 1;
  const auto one = run_task(parse_config(kMoments, o));
  o.threads = 3;
  const auto three = run_task(parse_config(kMoments, o));
  ASSERT_EQ(one.files.size(), 3u);
  EXPECT_EQ(one.files, three.files);
  for (const auto& [name, content] : one.files) EXPECT_EQ(content.rfind("# rcsc-csv v1 ", 0), 0u) << name;
}

TEST(Runner, GammaTaskReportsBoundsWithErrors) {
  auto text = replace(kMoments, "task = moments", "task = gamma");
  text = replace(text, "replicates = 200", "replicates = 1000") + "\n[gamma]\nouter = 20\ninner = 100\nfourth_moment_replicates = 500\n";
  const auto arts = run_task(parse_config(text));
  ASSERT_EQ(arts.files.size(), 1u);
  const auto& csv = arts.files[0].second;
  EXPECT_EQ(count(csv, "\ngamma,"), 6u);
  EXPECT_NE(csv.find("\nkolmogorov_bound,"), std::string::npos);
  EXPECT_NE(csv.find("\nempirical_kolmogorov,"), std::string::npos);
}
