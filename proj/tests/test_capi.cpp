#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "piedpiper/harness.hpp"
#include "piedpiper/piedpiper.h"
#include "piedpiper/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("pp_capi_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("version and status names are stable strings") {
  CHECK(std::string(pp_version()) == "0.1.0");
  CHECK(std::string(pp_status_name(PP_OK)) == "ok");
  CHECK(std::string(pp_status_name(PP_ERROR_DIGEST_MISMATCH)) == "digest mismatch");
}

TEST_CASE("config lifecycle through the C surface") {
  pp_config* cfg = nullptr;
  REQUIRE(pp_config_create(&cfg) == PP_OK);
  CHECK(pp_config_set(cfg, "seed", "33") == PP_OK);
  char buf[64];
  CHECK(pp_config_get(cfg, "seed", buf, sizeof(buf)) == PP_OK);
  CHECK(std::string(buf) == "33");

  CHECK(pp_config_set(cfg, "bogus", "1") == PP_ERROR_CONFIG);
  CHECK(std::string(pp_last_error()).find("bogus") != std::string::npos);
  CHECK(pp_config_set(nullptr, "seed", "1") == PP_ERROR_INVALID_ARGUMENT);
  CHECK(pp_config_get(cfg, "seed", buf, 1) == PP_ERROR_INVALID_ARGUMENT);
  pp_config_destroy(cfg);
}

TEST_CASE("config load applies a file on the C surface") {
  TempDir dir("cfg");
  pp::harness::write_file_atomic(dir.file("exp.cfg"),
                                 "scenario = GridOnly\nseed = 5\nn_chunks = 6\n");
  pp_config* cfg = nullptr;
  REQUIRE(pp_config_create(&cfg) == PP_OK);
  CHECK(pp_config_load(cfg, dir.file("exp.cfg").c_str()) == PP_OK);
  char buf[64];
  CHECK(pp_config_get(cfg, "scenario", buf, sizeof(buf)) == PP_OK);
  CHECK(std::string(buf) == "GridOnly");

  pp::harness::write_file_atomic(dir.file("bad.cfg"), "nonsense = 1\n");
  CHECK(pp_config_load(cfg, dir.file("bad.cfg").c_str()) == PP_ERROR_CONFIG);
  CHECK(pp_config_load(cfg, dir.file("missing.cfg").c_str()) == PP_ERROR_IO);
  pp_config_destroy(cfg);
}

TEST_CASE("run and replay through the C surface") {
  TempDir dir("run");
  pp_config* cfg = nullptr;
  REQUIRE(pp_config_create(&cfg) == PP_OK);
  REQUIRE(pp_config_set(cfg, "scenario", "GridOnly") == PP_OK);
  REQUIRE(pp_config_set(cfg, "seed", "4") == PP_OK);

  const std::string out = dir.file("out");
  CHECK(pp_run_experiment(cfg, out.c_str()) == PP_OK);
  const std::string manifest = out + "/manifest.txt";
  CHECK(pp_replay(manifest.c_str()) == PP_OK);

  std::string text = pp::harness::read_file(manifest);
  const auto pos = text.find("file grid_log.txt ");
  REQUIRE(pos != std::string::npos);
  text[pos + 18] = text[pos + 18] == 'f' ? 'e' : 'f';
  pp::harness::write_file_atomic(manifest, text);
  CHECK(pp_replay(manifest.c_str()) == PP_ERROR_DIGEST_MISMATCH);
  CHECK(pp_replay(dir.file("nope.txt").c_str()) == PP_ERROR_IO);
  pp_config_destroy(cfg);
}

TEST_CASE("epoch handles load and save through the C surface") {
  TempDir dir("epochs");
  // Build a small epoch file with the C++ side, round-trip it through C.
  pp::EpochSet set;
  set.fs_hz = 256.0;
  pp::Rng rng(3);
  for (int e = 0; e < 5; ++e) {
    pp::Epoch ep;
    ep.cls = pp::kStimulusClasses[static_cast<std::size_t>(e % 3)];
    ep.onset_sample = 26 + 256 * e;
    ep.data = pp::Matrix(2, 16);
    for (auto& v : ep.data.v) v = rng.gauss();
    set.epochs.push_back(std::move(ep));
  }
  pp::harness::save_epochs(set, dir.file("epochs.csv"));

  pp_epochs* handle = nullptr;
  REQUIRE(pp_epochs_load(dir.file("epochs.csv").c_str(), &handle) == PP_OK);
  CHECK(pp_epochs_count(handle) == 5);
  CHECK(pp_epochs_save(handle, dir.file("copy.csv").c_str()) == PP_OK);
  CHECK(pp::harness::read_file(dir.file("copy.csv")) ==
        pp::harness::read_file(dir.file("epochs.csv")));
  pp_epochs_destroy(handle);

  pp::harness::write_file_atomic(dir.file("bad.csv"), "256.0,1,2\nProbe,0,0,1.0\n");
  pp_epochs* bad = nullptr;
  CHECK(pp_epochs_load(dir.file("bad.csv").c_str(), &bad) == PP_ERROR_PARSE);
  CHECK(std::string(pp_last_error()).find("line 2") != std::string::npos);
}
