#include "crysynth/cli.hpp"
#include "crysynth/errors.hpp"
#include "crysynth/qasm.hpp"
#include "crysynth/sweep.hpp"

#include "gtest/gtest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace crysynth;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("crysynth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

const std::string kHeader = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

}  // namespace

TEST_F(CliTest, decompose_identity) {
  save_unitary(path("id.txt"), Matrix::Identity(4, 4));
  const CliRun r = run({"decompose", path("id.txt"), "--out", path("id.qasm"), "--report", path("r.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("CNOT=0"), std::string::npos) << r.out;
  EXPECT_EQ(load_qasm(path("id.qasm")).circuit.two_qubit_count(), 0u);

  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  ASSERT_EQ(doc["runs"].size(), 1u);
  const auto& run0 = doc["runs"][0];
  for (const char* key : {"status", "seed", "cnot_count", "single_qubit_count", "f_aligned", "fidelity_avg",
                          "fidelity_frob", "wall_time", "removed_blocks", "params", "qasm"})
    EXPECT_TRUE(run0.contains(key)) << key;
  EXPECT_EQ(doc["config"]["seed"], 0);
}

TEST_F(CliTest, decompose_line_coupling_and_determinism) {
  Circuit c(3);
  c.add(GateKind::H, {0});
  c.add(GateKind::CNOT, {0, 2});
  save_unitary(path("u.txt"), build_unitary(c, {}));
  const std::vector<std::string> base{"decompose", path("u.txt"), "--coupling", "0-1,1-2", "--seed", "4"};
  auto with_out = [&](const std::string& name) {
    auto a = base;
    a.insert(a.end(), {"--out", path(name)});
    return a;
  };
  ASSERT_EQ(run(with_out("a.qasm")).code, 0);
  ASSERT_EQ(run(with_out("b.qasm")).code, 0);
  EXPECT_EQ(slurp(path("a.qasm")), slurp(path("b.qasm")));
  for (const Gate& g : load_qasm(path("a.qasm")).circuit.gates())
    if (g.arity() == 2) EXPECT_EQ(std::abs(g.qubits[0] - g.qubits[1]), 1);
}

TEST_F(CliTest, decompose_errors) {
  spit(path("bad.txt"), "1\n1 0 0 0\n0 0 oops 0\n");
  CliRun r = run({"decompose", path("bad.txt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

  spit(path("nonunitary.txt"), "1\n1 0 1 0\n0 0 1 0\n");
  EXPECT_EQ(run({"decompose", path("nonunitary.txt")}).code, 1);
  EXPECT_EQ(run({"decompose", path("missing.txt")}).code, 1);
  EXPECT_EQ(run({"decompose"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);

  save_unitary(path("haar.txt"), random_unitary(4, 3));
  EXPECT_EQ(run({"decompose", path("haar.txt"), "--max-cells", "1"}).code, 2);
}

TEST_F(CliTest, recompress) {
  spit(path("pair.qasm"), kHeader + "qreg q[2];\ncx q[0],q[1];\ncx q[0],q[1];\n");
  CliRun r = run({"recompress", path("pair.qasm"), "--out", path("pair_out.qasm"), "--report", path("r.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_qasm(path("pair_out.qasm")).circuit.count(GateKind::CNOT), 0u);
  const auto doc = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(doc["runs"][0]["input_cnot_count"], 2);
  EXPECT_EQ(doc["runs"][0]["cnot_count"], 0);

  const std::string single = kHeader + "qreg q[2];\ncx q[1],q[0];\n";
  spit(path("single.qasm"), single);
  EXPECT_EQ(run({"recompress", path("single.qasm"), "--out", path("single_out.qasm")}).code, 0);
  const CircuitParams back = load_qasm(path("single_out.qasm"));
  EXPECT_EQ(back.circuit.size(), 1u);
  EXPECT_EQ(back.circuit.count(GateKind::CNOT), 1u);

  spit(path("measure.qasm"), kHeader + "qreg q[1];\ncreg c[1];\nmeasure q[0] -> c[0];\n");
  r = run({"recompress", path("measure.qasm")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("creg"), std::string::npos) << r.err;
}

TEST_F(CliTest, eval) {
  spit(path("c.qasm"), kHeader + "qreg q[2];\nh q[0];\ncx q[0],q[1];\nry(0.3) q[1];\n");
  const CircuitParams c = load_qasm(path("c.qasm"));
  save_unitary(path("u.txt"), build_unitary(c.circuit, c.params));
  CliRun r = run({"eval", path("c.qasm"), path("u.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string key;
  double value = 0;
  lines >> key >> value;
  EXPECT_EQ(key, "f_raw");
  lines >> key >> value;
  EXPECT_EQ(key, "f_aligned");
  EXPECT_LT(value, 1e-12);

  spit(path("z.qasm"), kHeader + "qreg q[1];\nz q[0];\n");
  save_unitary(path("i.txt"), Matrix::Identity(2, 2));
  r = run({"eval", path("z.qasm"), path("i.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("c_hst 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("fidelity_avg 0.333333333333\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, sweep_build_and_query) {
  const Circuit s = build_initial_structure(2, CouplingGraph::complete(2), 2);
  save_qasm(path("s.qasm"), s, ParamVector(static_cast<std::size_t>(s.n_params()), 0.0));
  CliRun r = run({"sweep", "build", "ZZ", "--grid", "0:2pi:16", "--structure", path("s.qasm"), "--table", path("t.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const SweepTable t = load_table(path("t.txt"), true);
  ASSERT_EQ(t.rows.size(), 16u);

  std::ostringstream alpha;
  alpha << std::setprecision(17) << t.alphas[3];
  r = run({"sweep", "query", "--table", path("t.txt"), "--alpha", alpha.str(), "--out", path("q.qasm")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ostringstream expected;
  expected << std::setprecision(17) << "params";
  for (double v : t.rows[3]) expected << ' ' << v;
  EXPECT_NE(r.out.find(expected.str()), std::string::npos) << r.out;
  const CircuitParams q = load_qasm(path("q.qasm"));
  EXPECT_LE(evaluate(pauli_exponential(PauliString("ZZ"), t.alphas[3]), q.circuit, q.params).f_aligned, 1e-8);

  EXPECT_EQ(run({"sweep", "query", "--table", path("t.txt"), "--alpha", "20"}).code, 1);
  EXPECT_EQ(run({"sweep", "build", "ZZ", "--grid", "0:1", "--structure", path("s.qasm")}).code, 1);
}
