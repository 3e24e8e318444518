#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "cli.hpp"
#include "format.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using tdeform::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result tdeform_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("tdeform-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

// Data rows after the header; checks that comments only precede it.
std::vector<std::vector<std::string>> csv_body(const std::string& text, const std::string& header) {
  const auto lines = lines_of(text);
  std::size_t i = 0;
  while (i < lines.size() && !lines[i].empty() && lines[i][0] == '#') ++i;
  REQUIRE(i < lines.size());
  CHECK(lines[i] == header);
  std::vector<std::vector<std::string>> rows;
  for (++i; i < lines.size(); ++i) {
    CHECK(lines[i].find('#') == std::string::npos);
    std::vector<std::string> cells;
    std::istringstream ls(lines[i]);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string body_text(const std::string& text) {
  std::string out;
  for (const auto& l : lines_of(text))
    if (l.empty() || l[0] != '#') out += l + '\n';
  return out;
}

double parse(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(ec == std::errc{});
  REQUIRE(ptr == s.data() + s.size());
  return v;
}

// Comma as the decimal separator, to catch locale-dependent printing.
struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

const std::vector<std::string> kChaoticModel{"--a", "2", "--b", "0.2", "--c", "30"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  using tdeform::cli::format_exact;
  for (double v : {0.0, 0.1, -1.0 / 3.0, 14.01, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)}) {
    const auto s = format_exact(v);
    CHECK(parse(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_exact(std::nan("")) == "nan");
  CHECK(tdeform::cli::format_table(-8.549834435) == "-8.5498");
}

TEST_CASE("equilibria subcommand") {
  SUBCASE("chaotic parameters, text") {
    const auto r = tdeform_cmd(concat({"equilibria"}, concat(kChaoticModel, {"--g", "0.9"})));
    REQUIRE(r.code == 0);
    const auto body = body_text(r.out);
    CHECK(lines_of(body).size() == 4);  // header + 3 rows
    CHECK(body.find("-2.4180    -1.1580    14.0000") != std::string::npos);
    CHECK(body.find("1.1580     2.4180    14.0000") != std::string::npos);
    CHECK(body.find("6.5498, -0.2000, -8.5498") != std::string::npos);
    CHECK(body.find("0.5977+3.7869i") != std::string::npos);
  }
  SUBCASE("chaotic parameters, json") {
    const auto r = tdeform_cmd(concat({"equilibria", "--json"}, concat(kChaoticModel, {"--g", "0.9"})));
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const auto& rows = doc.at("equilibria");
    REQUIRE(rows.size() == 3);
    const double want[3][3] = {{0, 0, 0}, {-2.42, -1.16, 14}, {1.16, 2.42, 14}};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::fabs(rows[i]["point"][k].get<double>() - want[i][k]) < 0.005);
    CHECK(rows[0]["classification"] == "SaddlePoint");
    CHECK(rows[1]["classification"] == "SaddleFocus");
    CHECK(rows[2]["classification"] == "SaddleFocus");
    CHECK(doc["manifest"]["config"]["g"] == "0.9");
    CHECK(doc["manifest"]["subcommand"] == "equilibria");
  }
  SUBCASE("c = a leaves only the origin") {
    const auto r = tdeform_cmd({"equilibria", "--a", "2", "--b", "0.2", "--c", "2", "--g", "0.5", "--json"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["equilibria"].size() == 1);
  }
  SUBCASE("a = 0 is a usage error naming the constraint") {
    const auto r = tdeform_cmd({"equilibria", "--a", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("a != 0") != std::string::npos);
  }
}

TEST_CASE("simulate subcommand") {
  TempDir dir;
  const auto csv = dir.file("traj.csv");
  for (const char* g : {"0", "0.9"}) {
    CAPTURE(g);
    const auto r = tdeform_cmd(concat({"simulate", "--g", g, "--x0", "0.01", "--y0", "0.01", "--z0", "14.01", "--t-end",
                                       "200", "--out", csv},
                                      kChaoticModel));
    REQUIRE(r.code == 0);
    const auto text = slurp(csv);
    CHECK(text.find('\r') == std::string::npos);
    const auto rows = csv_body(text, "t,x,y,z");
    REQUIRE(rows.size() == 20001);
    double worst = 0.0;
    for (const auto& row : rows) {
      REQUIRE(row.size() == 4);
      for (std::size_t k = 1; k < 4; ++k) worst = std::max(worst, std::fabs(parse(row[k])));
    }
    CHECK(worst < 100.0);
    CHECK(parse(rows.back()[0]) == 200.0);
  }

  SUBCASE("transient and sampling") {
    REQUIRE(tdeform_cmd({"simulate", "--t-end", "2", "--transient", "1", "--sample-every", "0.5", "--out", csv}).code ==
            0);
    const auto rows = csv_body(slurp(csv), "t,x,y,z");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "1");
    CHECK(rows[2][0] == "2");
  }
  SUBCASE("adaptive mode") {
    REQUIRE(tdeform_cmd({"simulate", "--t-end", "5", "--tol", "1e-10", "--out", csv}).code == 0);
    const auto text = slurp(csv);
    CHECK(text.find("# tol = 1e-10") != std::string::npos);
    CHECK(text.find("# dt = ") == std::string::npos);
    CHECK(csv_body(text, "t,x,y,z").size() == 501);
  }
  SUBCASE("locale-independent output") {
    const std::locale saved = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
    const auto r = tdeform_cmd({"simulate", "--t-end", "1", "--out", csv});
    std::locale::global(saved);
    REQUIRE(r.code == 0);
    for (const auto& row : csv_body(slurp(csv), "t,x,y,z")) CHECK(row.size() == 4);
  }
  SUBCASE("plot script") {
    const auto gp = dir.file("traj.gp");
    REQUIRE(tdeform_cmd({"simulate", "--t-end", "1", "--out", csv, "--plot", gp}).code == 0);
    const auto script = slurp(gp);
    CHECK(script.find("plot '" + fs::absolute(csv).string() + "' using 2:4") != std::string::npos);
    CHECK(script.find("splot '" + fs::absolute(csv).string() + "' using 2:3:4") != std::string::npos);
    CHECK(script.find("set datafile separator ','") != std::string::npos);
  }
  SUBCASE("usage errors") {
    CHECK(tdeform_cmd({"simulate", "--t-end", "0.0", "--out", csv}).code == 2);
    CHECK(tdeform_cmd({"simulate", "--t-end", "1"}).code == 2);  // --out missing
    CHECK(tdeform_cmd({"simulate", "--dt", "0.01", "--tol", "1e-8", "--out", csv}).code == 2);
    CHECK(tdeform_cmd({"simulate", "--dt", "-1", "--out", csv}).code == 2);
    CHECK(tdeform_cmd({"simulate", "--a", "abc", "--out", csv}).code == 2);
    CHECK(tdeform_cmd({"simulate", "--t-end", "1", "--out", dir.file("no/such/dir.csv")}).code == 2);
  }
  SUBCASE("integration failures exit 3 and name the failure") {
    const std::vector<std::string> huge{"--x0", "1e200", "--y0", "1e200", "--z0", "1e200", "--t-end", "1", "--out", csv};
    const auto fixed = tdeform_cmd(concat({"simulate"}, huge));
    CHECK(fixed.code == 3);
    CHECK(fixed.err.find("Overflow") != std::string::npos);
    const auto adaptive = tdeform_cmd(concat({"simulate", "--tol", "1e-9"}, huge));
    CHECK(adaptive.code == 3);
    const bool named = adaptive.err.find("Overflow") != std::string::npos ||
                       adaptive.err.find("StepUnderflow") != std::string::npos;
    CHECK(named);
  }
}

TEST_CASE("runs are reproducible from the manifest alone") {
  TempDir dir;
  const auto first = dir.file("a.csv");
  REQUIRE(tdeform_cmd({"simulate", "--g", "0.3", "--z0", "10", "--t-end", "3", "--sample-every", "0.1", "--out", first})
              .code == 0);
  const auto config = dir.file("a.conf");
  std::ofstream(config) << tdeform::cli::manifest_to_config(slurp(first));

  const auto second = dir.file("b.csv");
  REQUIRE(tdeform_cmd({"simulate", "--config", config, "--out", second}).code == 0);
  CHECK(body_text(slurp(first)) == body_text(slurp(second)));
  CHECK(slurp(second).find("# g = 0.3") != std::string::npos);

  SUBCASE("lyapunov manifests replay too") {
    const auto r1 = tdeform_cmd({"lyapunov", "--g", "0.5", "--transient", "1", "--total-time", "5"});
    REQUIRE(r1.code == 0);
    const auto conf = dir.file("l.conf");
    std::ofstream(conf) << tdeform::cli::manifest_to_config(r1.out);
    const auto r2 = tdeform_cmd({"lyapunov", "--config", conf});
    REQUIRE(r2.code == 0);
    CHECK(body_text(r1.out) == body_text(r2.out));
  }
}

TEST_CASE("config files") {
  TempDir dir;
  const auto conf = dir.file("run.conf");
  std::ofstream(conf) << "# sweep settings\n\nn-points = 3\ntotal-time = 2   # short\ntransient = 1\n"
                         "g-min = -1\ng-max = 1\nworkers = 1\n";
  SUBCASE("file values apply") {
    const auto r = tdeform_cmd({"sweep", "--config", conf});
    REQUIRE(r.code == 0);
    const auto rows = csv_body(r.out, "g,lambda1,lambda2,lambda3,status");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "-1");
    CHECK(rows[2][0] == "1");
  }
  SUBCASE("flags override the file, in either order") {
    for (const auto& args : {std::vector<std::string>{"sweep", "--config", conf, "--n-points", "2"},
                             std::vector<std::string>{"sweep", "--n-points", "2", "--config", conf}}) {
      const auto r = tdeform_cmd(args);
      REQUIRE(r.code == 0);
      CHECK(csv_body(r.out, "g,lambda1,lambda2,lambda3,status").size() == 2);
    }
  }
  SUBCASE("bad files are usage errors") {
    CHECK(tdeform_cmd({"sweep", "--config", dir.file("missing.conf")}).code == 2);
    const auto bad = dir.file("bad.conf");
    std::ofstream(bad) << "n-points 3\n";
    CHECK(tdeform_cmd({"sweep", "--config", bad}).code == 2);
    std::ofstream(bad) << "unknown-key = 3\n";
    CHECK(tdeform_cmd({"sweep", "--config", bad}).code == 2);
  }
}

TEST_CASE("lyapunov subcommand") {
  SUBCASE("linear test field") {
    const auto r = tdeform_cmd({"lyapunov", "--field", "linear-test", "--transient", "0", "--total-time", "10", "--json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(std::fabs(doc["exponents"][0].get<double>() + 1.0) < 1e-6);
    CHECK(std::fabs(doc["exponents"][1].get<double>() + 2.0) < 1e-6);
    CHECK(std::fabs(doc["exponents"][2].get<double>() + 3.0) < 1e-6);
    CHECK(doc["closure_residual"].get<double>() < 1e-6);
  }
  SUBCASE("text report lists every quantity") {
    const auto r = tdeform_cmd({"lyapunov", "--transient", "1", "--total-time", "5"});
    REQUIRE(r.code == 0);
    for (const char* key : {"lambda1", "lambda2", "lambda3", "kaplan_yorke", "trace_average", "closure_residual"})
      CHECK(r.out.find(key) != std::string::npos);
  }
  SUBCASE("convergence history") {
    TempDir dir;
    const auto hist = dir.file("h.csv");
    REQUIRE(tdeform_cmd({"lyapunov", "--transient", "0", "--total-time", "30", "--history", hist}).code == 0);
    CHECK(csv_body(slurp(hist), "time,lambda1,lambda2,lambda3").size() == 3);
  }
  SUBCASE("usage errors") {
    CHECK(tdeform_cmd({"lyapunov", "--total-time", "0"}).code == 2);
    CHECK(tdeform_cmd({"lyapunov", "--renorm", "0.00015"}).code == 2);
    CHECK(tdeform_cmd({"lyapunov", "--field", "lorenz"}).code == 2);
  }
  SUBCASE("escape exits 3") {
    const auto r = tdeform_cmd({"lyapunov", "--x0", "1e200", "--y0", "1e200", "--z0", "1e200", "--transient", "0",
                                "--total-time", "1"});
    CHECK(r.code == 3);
    CHECK(r.err.find("Overflow") != std::string::npos);
  }
}

TEST_CASE("sweep subcommand") {
  const std::vector<std::string> quick{"--transient", "5", "--total-time", "20"};
  SUBCASE("two points are exactly the endpoints") {
    const auto r = tdeform_cmd(concat({"sweep", "--n-points", "2", "--workers", "1"}, quick));
    REQUIRE(r.code == 0);
    const auto rows = csv_body(r.out, "g,lambda1,lambda2,lambda3,status");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "-1.2");
    CHECK(rows[1][0] == "1.2");
    CHECK(rows[0][4] == "Ok");
  }
  SUBCASE("bodies do not depend on the worker count") {
    const auto one = tdeform_cmd(concat({"sweep", "--n-points", "7", "--workers", "1"}, quick));
    const auto many = tdeform_cmd(concat({"sweep", "--n-points", "7", "--workers", "8"}, quick));
    REQUIRE(one.code == 0);
    REQUIRE(many.code == 0);
    CHECK(body_text(one.out) == body_text(many.out));
    CHECK(many.out.find("# workers = 8") != std::string::npos);
  }
  SUBCASE("worker count from the environment") {
    ::setenv(tdeform::cli::kWorkersEnv, "3", 1);
    const auto r = tdeform_cmd(concat({"sweep", "--n-points", "2"}, quick));
    const auto flag = tdeform_cmd(concat({"sweep", "--n-points", "2", "--workers", "2"}, quick));
    ::setenv(tdeform::cli::kWorkersEnv, "zero", 1);
    const auto bad = tdeform_cmd(concat({"sweep", "--n-points", "2"}, quick));
    ::unsetenv(tdeform::cli::kWorkersEnv);
    CHECK(r.out.find("# workers = 3") != std::string::npos);
    CHECK(flag.out.find("# workers = 2") != std::string::npos);
    CHECK(bad.code == 2);
  }
  SUBCASE("file output and plot script") {
    TempDir dir;
    const auto csv = dir.file("sweep.csv");
    const auto gp = dir.file("sweep.gp");
    REQUIRE(tdeform_cmd(concat({"sweep", "--n-points", "3", "--out", csv, "--plot", gp}, quick)).code == 0);
    CHECK(csv_body(slurp(csv), "g,lambda1,lambda2,lambda3,status").size() == 3);
    CHECK(slurp(gp).find("'" + fs::absolute(csv).string() + "' using 1:2") != std::string::npos);
  }
  SUBCASE("invalid grids") {
    CHECK(tdeform_cmd({"sweep", "--n-points", "1"}).code == 2);
    CHECK(tdeform_cmd({"sweep", "--g-min", "1", "--g-max", "-1"}).code == 2);
    CHECK(tdeform_cmd({"sweep", "--workers", "0"}).code == 2);
    CHECK(tdeform_cmd({"sweep", "--total-time", "0"}).code == 2);
    CHECK(tdeform_cmd({"sweep", "--plot", "x.gp"}).code == 2);  // plot needs a file
  }
}

TEST_CASE("verify subcommand") {
  SUBCASE("passes at the chaotic parameters") {
    const auto r = tdeform_cmd(concat({"verify"}, kChaoticModel));
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("all 9 checks passed") != std::string::npos);

    tdeform::cli::VerifyOptions opt;
    const auto report = tdeform::cli::run_identity_suite(opt);
    for (const auto& c : report.checks) {
      CAPTURE(c.name);
      CHECK(c.passed);
      // Pointwise identities; the drift and finite-difference checks carry their own bounds.
      const bool pointwise = c.name.find("drift") == std::string::npos && c.name.find("Jacobian") == std::string::npos;
      if (pointwise) CHECK(c.residual < 1e-10);
    }
  }
  SUBCASE("seed and sample count are honoured") {
    const auto r = tdeform_cmd({"verify", "--seed", "7", "--samples", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# seed = 7") != std::string::npos);
    CHECK(tdeform_cmd({"verify", "--samples", "0"}).code == 2);
  }
  SUBCASE("near-zero a warns but still runs") {
    const auto r = tdeform_cmd({"verify", "--a", "1e-30"});
    CHECK(r.out.find("warning:") != std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
  }
  SUBCASE("negative a skips integration checks") {
    const auto r = tdeform_cmd({"verify", "--a", "-1"});
    CHECK(r.out.find("SKIP") != std::string::npos);
  }
  SUBCASE("a corrupted field fails") {
    const auto r = tdeform_cmd({"verify", "--corrupt"});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL  hamilton-poisson conservation") != std::string::npos);
  }
  SUBCASE("a = 0 is rejected") { CHECK(tdeform_cmd({"verify", "--a", "0"}).code == 2); }
}

TEST_CASE("top-level usage") {
  CHECK(tdeform_cmd({}).code == 2);
  CHECK(tdeform_cmd({"frobnicate"}).code == 2);
  const auto help = tdeform_cmd({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("--corrupt") == std::string::npos);
  const auto sub_help = tdeform_cmd({"verify", "--help"});
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--corrupt") == std::string::npos);
  CHECK(tdeform_cmd({"--version"}).code == 0);
}
