#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "rcaus/hash.hpp"
#include "rcaus/pipeline.hpp"
#include "support.hpp"

using namespace rcaus;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(RCAUS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  char buf[512];
  while (const auto n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path write_config(const test::TempDir& dir, const std::string& extra = {}) {
  const auto path = dir / "run.cfg";
  std::ofstream(path) << "geometry.rows = 8\ngeometry.cols = 8\ngeometry.pitch = 250e-6\n"
                         "geometry.center_frequency = 6.25e6\nmedium.sampling_frequency = 50e6\n"
                         "scheme.opt.kind = optimus\nscheme.opt.angle_count = 3\nscheme.opt.max_angle = 0.2\n"
                         "phantom.kind = grid\nphantom.x_extent = 0 0\nphantom.y_extent = 0 0\n"
                         "phantom.z_extent = 3e-3 3e-3\nphantom.spacing = 1e-3 1e-3 1e-3\n"
                         "grid.origin = -0.5e-3 -0.5e-3 2.5e-3\ngrid.spacing = 0.1e-3 0.1e-3 0.1e-3\n"
                         "grid.counts = 11 11 11\nrun.output_dir = "
                      << (dir / "out").string() << '\n'
                      << extra;
  return path;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("describe /nonexistent.cfg").code, 2);
}

TEST(Cli, DescribePrintsRates) {
  test::TempDir dir("cli");
  const auto r = cli("describe " + write_config(dir).string() + " --prf 5000");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("scheme opt kind=optimus events=24"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("acquisition_rate=208.33 Hz"), std::string::npos) << r.out;
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  test::TempDir dir("cli");
  EXPECT_EQ(cli("describe " + write_config(dir, "geometry.kerf = 10 um\n").string()).code, 2);
  EXPECT_EQ(cli("describe " + write_config(dir, "bogus.key = 1\n").string()).code, 2);
  EXPECT_EQ(cli("simulate " + write_config(dir).string() + " --scheme nope").code, 2);
}

TEST(Cli, StagesChainAndRunMatches) {
  test::TempDir dir("cli");
  const auto cfg = write_config(dir).string();
  const auto s = dir / "staged";
  ASSERT_EQ(cli("simulate " + cfg + " --out " + (s / "ev.bin").string()).code, 0);
  ASSERT_EQ(cli("decode " + cfg + " --input " + (s / "ev.bin").string() + " --output " + (s / "dec.bin").string()).code,
            0);
  ASSERT_EQ(
      cli("beamform " + cfg + " --input " + (s / "dec.bin").string() + " --output " + (s / "vol.bin").string()).code,
      0);
  ASSERT_EQ(
      cli("metrics " + cfg + " --input " + (s / "vol.bin").string() + " --output " + (s / "res.csv").string()).code,
      0);
  const auto render = cli("render " + cfg + " --input " + (s / "vol.bin").string() + " --out " +
                          (s / "img").string() + " --mip y");
  EXPECT_EQ(render.code, 0);
  EXPECT_NE(render.out.find("vol.mip_y0.pgm"), std::string::npos) << render.out;

  const auto run = cli("run " + cfg + " --threads 2");
  ASSERT_EQ(run.code, 0);
  const auto manifest = read_manifest(dir / "out" / "manifest.txt");
  std::map<std::string, std::uint64_t> hashes;
  for (const auto& e : manifest) hashes[e.path] = e.hash;
  for (const auto& [name, staged] :
       {std::pair{"opt.events.bin", "ev.bin"}, {"opt.decoded.bin", "dec.bin"}, {"opt.volume.bin", "vol.bin"}})
    EXPECT_EQ(hashes.at(name), fnv1a64_file(s / staged)) << name;
}

TEST(Cli, StageErrorsExitWithThree) {
  test::TempDir dir("cli");
  const auto cfg = write_config(dir).string();
  ASSERT_EQ(cli("simulate " + cfg + " --out " + (dir / "ev.bin").string()).code, 0);
  EXPECT_EQ(cli("beamform " + cfg + " --input " + (dir / "ev.bin").string() + " --output " +
                (dir / "v.bin").string())
                .code,
            3);
  std::ofstream(dir / "junk.bin") << "not a dataset";
  EXPECT_EQ(cli("decode " + cfg + " --input " + (dir / "junk.bin").string() + " --output " +
                (dir / "d.bin").string())
                .code,
            3);
}
