// Copyright 2026 The SMLP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/types.h>
#include <sys/wait.h>
#include <signal.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

Result Smlp(const std::string& args) {
  std::string cmd = std::string(SMLP_BINARY) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("smlp_cli_" + std::to_string(getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  void MakeKeysAndData(std::size_t rows = 20) {
    ASSERT_EQ(Smlp("--seed 3 keygen --bits 512 --public " + P("k.pub") +
                  " --private " + P("k.key")).code, 0);
    ASSERT_EQ(Smlp("--seed 4 gen-dataset --rows " + std::to_string(rows) +
                  " --out " + P("d.csv")).code, 0);
    ASSERT_EQ(Smlp("--seed 5 encrypt-dataset --input " + P("d.csv") +
                  " --public-key " + P("k.pub") + " --out " + P("d.enc")).code, 0);
  }

  std::string Loopback() const {
    return " --transport loopback --p2-keys " + P("k.key");
  }

  fs::path dir_;
};

TEST_F(CliTest, KeygenRefusesOverwriteAndIsSeedDeterministic) {
  Result r = Smlp("--seed 1 keygen --bits 512 --public " + P("a.pub") +
                 " --private " + P("a.key"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("bits 512"), std::string::npos) << r.output;
  Result again = Smlp("--seed 1 keygen --bits 512 --public " + P("a.pub") +
                     " --private " + P("a.key"));
  EXPECT_NE(again.code, 0);
  EXPECT_NE(again.output.find("exists"), std::string::npos) << again.output;
  ASSERT_EQ(Smlp("--seed 1 keygen --bits 512 --public " + P("b.pub") +
                " --private " + P("b.key")).code, 0);
  EXPECT_EQ(Slurp(P("a.key")), Slurp(P("b.key")));
  ASSERT_EQ(Smlp("--seed 1 --force keygen --bits 512 --public " + P("a.pub") +
                " --private " + P("a.key")).code, 0);
}

TEST_F(CliTest, KeygenRejectsTinyModulus) {
  EXPECT_EQ(Smlp("keygen --bits 64 --public " + P("a.pub") + " --private " + P("a.key")).code, 4);
}

TEST_F(CliTest, EncryptDatasetRowCountAndDecryptRoundTrip) {
  MakeKeysAndData(20);
  Result dec = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("d.enc"));
  ASSERT_EQ(dec.code, 0) << dec.output;
  std::size_t lines = std::count(dec.output.begin(), dec.output.end(), '\n');
  EXPECT_EQ(lines, 21u);
  Result part = Smlp("encrypt-dataset --input " + P("d.csv") + " --public-key " +
                    P("k.pub") + " --out " + P("p.enc") + " --from 5 --count 4 --no-labels");
  ASSERT_EQ(part.code, 0) << part.output;
  EXPECT_NE(part.output.find("rows 4"), std::string::npos) << part.output;
}

TEST_F(CliTest, MalformedCsvReportsLine) {
  ASSERT_EQ(Smlp("--seed 3 keygen --bits 512 --public " + P("k.pub") +
                " --private " + P("k.key")).code, 0);
  std::ofstream(P("bad.csv")) << "x1,x2,label\n0.1,0.2,0\n0.5,oops,1\n";
  Result r = Smlp("encrypt-dataset --input " + P("bad.csv") + " --public-key " +
                 P("k.pub") + " --out " + P("bad.enc"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 3"), std::string::npos) << r.output;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Smlp("train --data x").code, 2);
  EXPECT_EQ(Smlp("no-such-command").code, 2);
  EXPECT_EQ(Smlp("").code, 2);
  EXPECT_EQ(Smlp("--help").code, 0);
}

TEST_F(CliTest, SocketWithoutHelperExitsThree) {
  MakeKeysAndData(4);
  Result r = Smlp("train --data " + P("d.enc") + " --public-key " + P("k.pub") +
                 " --model-out " + P("m.json") + " --epochs 1 --p2 127.0.0.1:1");
  EXPECT_EQ(r.code, 3) << r.output;
  Result no_addr = Smlp("train --data " + P("d.enc") + " --public-key " + P("k.pub") +
                       " --model-out " + P("m2.json") + " --epochs 1");
  EXPECT_EQ(no_addr.code, 2) << no_addr.output;
}

TEST_F(CliTest, LoopbackTrainResumeClassifyDecrypt) {
  MakeKeysAndData(20);
  const std::string common = "train --data " + P("d.enc") + " --public-key " +
                             P("k.pub") + Loopback() + " --lambda 1e-6";
  Result full = Smlp("--seed 9 " + common + " --model-out " + P("full.json") +
                    " --loss-out " + P("loss.json") + " --epochs 2");
  ASSERT_EQ(full.code, 0) << full.output;
  EXPECT_NE(full.output.find("epochs 2"), std::string::npos) << full.output;

  ASSERT_EQ(Smlp("--seed 9 " + common + " --model-out " + P("half.json") + " --epochs 1").code, 0);
  Result refused = Smlp("--seed 9 " + common + " --model-out " + P("half.json") + " --epochs 1");
  EXPECT_NE(refused.code, 0);
  Result resumed = Smlp("--seed 9 " + common + " --model-out " + P("half.json") +
                       " --epochs 2 --resume");
  ASSERT_EQ(resumed.code, 0) << resumed.output;

  Result wf = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("full.json"));
  Result wh = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("half.json"));
  ASSERT_EQ(wf.code, 0);
  EXPECT_EQ(wf.output, wh.output);
  EXPECT_NE(wf.output.find("layer,row,col,weight"), std::string::npos);

  Result loss = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("loss.json"));
  ASSERT_EQ(loss.code, 0);
  EXPECT_NE(loss.output.find("\n2,"), std::string::npos) << loss.output;

  ASSERT_EQ(Smlp("encrypt-dataset --no-labels --input " + P("d.csv") + " --public-key " +
                P("k.pub") + " --out " + P("q.enc")).code, 0);
  Result cls = Smlp("classify --model " + P("full.json") + " --input " + P("q.enc") +
                   " --public-key " + P("k.pub") + " --out " + P("out.json") + Loopback());
  ASSERT_EQ(cls.code, 0) << cls.output;
  Result outs = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("out.json") +
                    " --out " + P("out.csv"));
  ASSERT_EQ(outs.code, 0);
  std::string csv = Slurp(P("out.csv"));
  EXPECT_EQ(csv.rfind("row,output,class\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

TEST_F(CliTest, LoopbackNeedsKeys) {
  MakeKeysAndData(4);
  Result r = Smlp("train --data " + P("d.enc") + " --public-key " + P("k.pub") +
                 " --model-out " + P("m.json") + " --transport loopback");
  EXPECT_EQ(r.code, 2) << r.output;
}

TEST_F(CliTest, SocketHelperMatchesLoopback) {
  MakeKeysAndData(6);
  int out_pipe[2];
  ASSERT_EQ(pipe(out_pipe), 0);
  pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::string keys = P("k.key");
    execl(SMLP_BINARY, SMLP_BINARY, "serve-p2", "--keys", keys.c_str(),
          "--listen", "127.0.0.1:0", "--quiet", static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  FILE* server_out = fdopen(out_pipe[0], "r");
  char line[256] = {0};
  ASSERT_NE(fgets(line, sizeof line, server_out), nullptr);
  std::string banner(line);
  ASSERT_EQ(banner.rfind("listening on ", 0), 0u) << banner;
  std::string addr = banner.substr(13);
  addr.erase(addr.find_last_not_of("\r\n") + 1);

  const std::string common = "--seed 2 train --data " + P("d.enc") + " --public-key " +
                             P("k.pub") + " --epochs 2";
  Result sock = Smlp(common + " --model-out " + P("s.json") + " --p2 " + addr);
  Result loop = Smlp(common + " --model-out " + P("l.json") + Loopback());

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  std::string rest;
  while (fgets(line, sizeof line, server_out) != nullptr) rest += line;
  fclose(server_out);

  ASSERT_EQ(sock.code, 0) << sock.output;
  ASSERT_EQ(loop.code, 0) << loop.output;
  EXPECT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);
  EXPECT_NE(rest.find("stopped after"), std::string::npos) << rest;
  Result a = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("s.json"));
  Result b = Smlp("decrypt-result --keys " + P("k.key") + " --input " + P("l.json"));
  EXPECT_EQ(a.output, b.output);
}

TEST_F(CliTest, OracleTrainAndEval) {
  ASSERT_EQ(Smlp("--seed 4 gen-dataset --rows 300 --out " + P("d.csv")).code, 0);
  Result r = Smlp("--seed 1 oracle train --data " + P("d.csv") +
                 " --train-size 200 --epochs 20 --out " + P("clear.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("test_accuracy"), std::string::npos) << r.output;
  Result e = Smlp("oracle eval --model " + P("clear.json") + " --data " + P("d.csv") + " --from 200");
  ASSERT_EQ(e.code, 0) << e.output;
  EXPECT_NE(e.output.find("accuracy"), std::string::npos);
}

TEST_F(CliTest, Table1Smoke) {
  Result r = Smlp("--seed 1 table1 --preset smoke --lambdas 1e-8,1e-4 --json " +
                 P("t.json") + " --markdown " + P("t.md"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(Slurp(P("t.md")).find("Convergence (Y/N)/Accuracy"), std::string::npos);
  EXPECT_NE(Slurp(P("t.json")).find("smlp-table1-report"), std::string::npos);
}

}  // namespace
