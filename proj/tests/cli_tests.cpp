// End-to-end checks that drive the built `engine` binary: render/check/replay
// via fork+exec with captured stdout and exit codes, and serve via a real
// TCP client plus SIGTERM shutdown.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixture_util.hpp"

namespace {

int g_failures = 0;

#define CHECK_TRUE(cond)                                                      \
  do {                                                                        \
    if (!(cond)) {                                                            \
      ++g_failures;                                                           \
      std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << ": " << #cond    \
                << "\n";                                                      \
    }                                                                         \
  } while (0)

struct run_result {
  int exit_code = -1;
  std::string out;
};

run_result run_engine(const std::vector<std::string>& args,
                      const std::vector<std::pair<std::string, std::string>>& env = {}) {
  int fds[2];
  if (pipe(fds) != 0) return {};
  pid_t pid = fork();
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> argv;
    std::string bin = ENGINE_BIN;
    argv.push_back(bin.data());
    std::vector<std::string> copy = args;
    for (std::string& a : copy) argv.push_back(a.data());
    argv.push_back(nullptr);
    execv(ENGINE_BIN, argv.data());
    _exit(127);
  }
  close(fds[1]);
  run_result result;
  char buf[4096];
  ssize_t n;
  while ((n = read(fds[0], buf, sizeof(buf))) > 0) result.out.append(buf, n);
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct smartspace_files {
  fixture::temp_dir dir{"engine-cli"};
  std::string config_path;
  std::string out_dir;

  smartspace_files() {
    std::string model = dir.file(
        "site.model",
        "IMPLIES(AND(TimeInterval(0,200),Owner(\"cloud\")),OccupyBox(0,0,9,9))\n"
        "IMPLIES(AND(TimeInterval(0,200),Owner(\"cloud\")),OccupyBox(20,0,29,9))\n");
    std::string rules = dir.file(
        "rules.txt",
        "rule id=solar-critical window=0..100 owner=cloud area=0,0,9,9;20,0,29,9 "
        "threshold=0.5 reaction=\"critical solar energy level\" "
        "cmd=\"map lat=-38.1771269 long=146.3428259 zoom=15z\" "
        "cmd=\"earth lat=-38.1771269 long=146.3428259 height=100m\"\n");
    std::string profiles = dir.file(
        "profiles.txt",
        "profile id=bob caps=electrical avail=0..500 loc=4,5 device=tablet-bob\n");
    std::string registry = dir.file(
        "devices.txt",
        "device id=wall caps=banner,display,image,map,earth default=true\n"
        "device id=tablet-bob caps=banner,display\n");
    out_dir = (dir.path() / "out").string();
    config_path = dir.file("engine.conf", "model = " + model + "\nrules = " + rules +
                                              "\nprofiles = " + profiles +
                                              "\nregistry = " + registry +
                                              "\nout_dir = " + out_dir + "\n");
  }
};

void test_render() {
  fixture::temp_dir dir("engine-render");
  std::string cmds = dir.file("commands.txt",
                              "display profile=ptz_camera3_view\n"
                              "image file=gridsubstation.jpg rect=350,600,120,150 "
                              "text=130,90,red,\"Incident at Grid Substation\"\n"
                              "earth lat=-38.1771269 long=146.3428259 height=100m\n"
                              "map lat=-38.1771269 long=146.3428259 zoom=15z\n");
  run_result r = run_engine({"render", "--in", cmds});
  CHECK_TRUE(r.exit_code == 0);
  CHECK_TRUE(r.out.find("<command type=\"display\" profile=\"ptz_camera3_view\"></command>") !=
             std::string::npos);
  CHECK_TRUE(r.out.find("lat=\"-38.1771269\"") != std::string::npos);
  CHECK_TRUE(r.out.find("zoom=\"15z\"") != std::string::npos);

  run_result missing = run_engine({"render", "--in", "/nonexistent.txt"});
  CHECK_TRUE(missing.exit_code == 1);
}

void test_check() {
  smartspace_files fx;
  run_result triggered = run_engine({"check", "--config", fx.config_path, "--at", "50"});
  CHECK_TRUE(triggered.exit_code == 2);
  CHECK_TRUE(triggered.out.find("type=\"map\"") != std::string::npos);
  CHECK_TRUE(triggered.out.find("type=\"earth\"") != std::string::npos);

  run_result quiet = run_engine({"check", "--config", fx.config_path, "--at", "150"});
  CHECK_TRUE(quiet.exit_code == 0);
  CHECK_TRUE(quiet.out == "<output></output>\n");

  run_result bad = run_engine({"check", "--config", "/nonexistent.conf", "--at", "0"});
  CHECK_TRUE(bad.exit_code == 1);

  // --at-time maps wall clock through the configured epoch and tick size
  // (defaults: epoch 1970, 60s ticks; tick 50 lies inside the rule window)
  run_result timed = run_engine(
      {"check", "--config", fx.config_path, "--at-time", "1970-01-01T00:50:30Z"});
  CHECK_TRUE(timed.exit_code == 2);
}

void test_replay() {
  smartspace_files fx;
  std::string events = fx.dir.file("events.txt",
                                   "evt src=valve-7 t=10 cat=alarm sev=3 loc=\"4,6\" "
                                   "cap=electrical\n"
                                   "not an event\n");
  std::string weather = fx.dir.file("weather.txt",
                                    "wx t=5 kind=cloud box=0,0,9,9\n"
                                    "wx t=5 kind=cloud box=20,0,29,9\n");
  run_result r = run_engine(
      {"replay", "--config", fx.config_path, "--events", events, "--weather", weather});
  CHECK_TRUE(r.exit_code == 2);  // the coverage rule fires
  CHECK_TRUE(r.out.find("events=1") != std::string::npos);
  CHECK_TRUE(r.out.find("malformed=1") != std::string::npos);
  CHECK_TRUE(r.out.find("coalesced-groups=1") != std::string::npos);
  CHECK_TRUE(std::filesystem::exists(std::filesystem::path(fx.out_dir) / "wall.xml"));

  // ENGINE_OUT_DIR overrides the configured out_dir.
  std::string env_dir = (fx.dir.path() / "env-out").string();
  run_result enved = run_engine(
      {"replay", "--config", fx.config_path, "--events", events, "--weather", weather},
      {{"ENGINE_OUT_DIR", env_dir}});
  CHECK_TRUE(enved.exit_code == 2);
  CHECK_TRUE(std::filesystem::exists(std::filesystem::path(env_dir) / "wall.xml"));
}

int connect_with_retry(int port) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
      timeval tv{5, 0};
      ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
      return fd;
    }
    ::close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return -1;
}

std::string send_line(int fd, const std::string& line) {
  std::string msg = line + "\n";
  ::send(fd, msg.data(), msg.size(), MSG_NOSIGNAL);
  std::string buf;
  char c;
  while (::recv(fd, &c, 1, 0) == 1) {
    if (c == '\n') break;
    buf.push_back(c);
  }
  return buf;
}

void test_serve() {
  smartspace_files fx;
  const int port = 20000 + (getpid() % 10000);

  pid_t pid = fork();
  if (pid == 0) {
    std::string bin = ENGINE_BIN;
    std::string port_s = std::to_string(port);
    std::vector<std::string> args{"serve", "--config", fx.config_path, "--port", port_s};
    std::vector<char*> argv;
    argv.push_back(bin.data());
    for (std::string& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    execv(ENGINE_BIN, argv.data());
    _exit(127);
  }

  int fd = connect_with_retry(port);
  CHECK_TRUE(fd >= 0);
  if (fd >= 0) {
    CHECK_TRUE(send_line(fd, "evt src=valve t=10 cat=alarm sev=2") == "ok");
    CHECK_TRUE(send_line(fd, "garbage line") == "err malformed");
    // distinct categories so each accepted event becomes its own banner
    for (int i = 0; i < 20; ++i) {
      CHECK_TRUE(send_line(fd, "evt src=s t=" + std::to_string(10 + i) + " cat=c" +
                                   std::to_string(i)) == "ok");
    }
    ::close(fd);
  }

  int wfd = connect_with_retry(port + 1);
  CHECK_TRUE(wfd >= 0);
  if (wfd >= 0) {
    CHECK_TRUE(send_line(wfd, "wx t=5 kind=cloud box=0,0,9,9") == "ok");
    CHECK_TRUE(send_line(wfd, "wx t=5 kind=cloud box=20,0,29,9") == "ok");
    CHECK_TRUE(send_line(wfd, "wx nope") == "err malformed");
    ::close(wfd);
  }

  // allow one processing cycle, then ask for a graceful drain
  std::this_thread::sleep_for(std::chrono::milliseconds(400));
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  CHECK_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);

  // flush contract: all 21 accepted events appear as banners
  std::string wall = fixture::read_file(std::filesystem::path(fx.out_dir) / "wall.xml");
  std::size_t banners = 0;
  for (std::size_t at = wall.find("type=\"event\""); at != std::string::npos;
       at = wall.find("type=\"event\"", at + 1)) {
    ++banners;
  }
  CHECK_TRUE(banners == 21);
  // the weather rule fired
  CHECK_TRUE(wall.find("type=\"map\"") != std::string::npos);
}

void test_serve_backpressure() {
  smartspace_files fx;
  const int port = 31000 + (getpid() % 5000);

  pid_t pid = fork();
  if (pid == 0) {
    std::string bin = ENGINE_BIN;
    std::string port_s = std::to_string(port);
    std::vector<std::string> args{"serve",  "--config",         fx.config_path,
                                  "--port", port_s,             "--queue-capacity", "1"};
    std::vector<char*> argv;
    argv.push_back(bin.data());
    for (std::string& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    execv(ENGINE_BIN, argv.data());
    _exit(127);
  }

  int fd = connect_with_retry(port);
  CHECK_TRUE(fd >= 0);
  int ok = 0, backpressure = 0;
  if (fd >= 0) {
    // a burst far faster than the drain cycle: with capacity 1 most of
    // these must be refused
    for (int i = 0; i < 50; ++i) {
      std::string resp = send_line(fd, "evt src=burst t=" + std::to_string(i) + " cat=c");
      if (resp == "ok") ++ok;
      if (resp == "err backpressure") ++backpressure;
    }
    ::close(fd);
  }
  CHECK_TRUE(ok >= 1);
  CHECK_TRUE(backpressure >= 1);
  CHECK_TRUE(ok + backpressure == 50);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  CHECK_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);
}

}  // namespace

int main() {
  test_render();
  test_check();
  test_replay();
  test_serve();
  test_serve_backpressure();
  if (g_failures == 0) {
    std::cout << "cli_tests: all checks passed\n";
    return 0;
  }
  std::cout << "cli_tests: " << g_failures << " check(s) failed\n";
  return 1;
}
