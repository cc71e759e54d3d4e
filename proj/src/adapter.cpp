#include "omnitrack/adapter.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include "omnitrack/errors.hpp"

extern char** environ;

namespace omni {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::max<long long>(0, left.count()));
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
  return "stopped";
}

}  // namespace

ProcessAdapter::ProcessAdapter(std::string command, std::chrono::milliseconds timeout,
                               std::map<std::string, std::string> env)
    : command_(std::move(command)), timeout_(timeout) {
  // Environment and argv are built before fork; the child only execs.
  std::vector<std::string> env_strings;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv(*e);
    const auto eq = kv.find('=');
    if (eq != std::string::npos && env.count(kv.substr(0, eq))) continue;
    env_strings.push_back(kv);
  }
  for (const auto& [k, v] : env) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::string sh = "/bin/sh", dash_c = "-c";
  std::vector<char*> argv{sh.data(), dash_c.data(), command_.data(), nullptr};

  int in_pair[2], out_pair[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    throw AdapterError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
    ::close(in_pair[0]);
    ::close(in_pair[1]);
    throw AdapterError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in_pair[0], in_pair[1], out_pair[0], out_pair[1]}) ::close(fd);
    throw AdapterError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pair[1], STDIN_FILENO);
    dup2(out_pair[1], STDOUT_FILENO);
    execve(argv[0], argv.data(), envp.data());
    _exit(127);
  }
  setpgid(pid, pid);
  pid_ = pgid_ = pid;
  ::close(in_pair[1]);
  ::close(out_pair[1]);
  to_child_ = in_pair[0];
  from_child_ = out_pair[0];
  fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  fcntl(from_child_, F_SETFL, fcntl(from_child_, F_GETFL) | O_NONBLOCK);
}

ProcessAdapter::~ProcessAdapter() {
  try {
    close();
  } catch (...) {
  }
  kill_child();
}

void ProcessAdapter::kill_child() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pgid_ > 0) {
    ::kill(-pgid_, SIGKILL);
    pgid_ = -1;
  }
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

void ProcessAdapter::fail(const std::string& why) {
  broken_ = true;
  std::string detail;
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      detail = " (adapter " + describe_status(status) + ")";
      pid_ = -1;
    }
  }
  kill_child();
  throw AdapterError("adapter '" + command_ + "': " + why + detail);
}

void ProcessAdapter::send(const json& msg, const std::vector<std::uint8_t>* payload) {
  if (!alive()) throw AdapterError("adapter '" + command_ + "' is no longer running");
  const auto deadline = Clock::now() + timeout_;
  const std::string line = msg.dump() + "\n";
  auto write_all = [&](const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
      const ssize_t k = ::send(to_child_, data, n, MSG_NOSIGNAL);
      if (k > 0) {
        data += k;
        n -= static_cast<std::size_t>(k);
        continue;
      }
      if (k < 0 && errno == EINTR) continue;
      if (k < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        pollfd p{to_child_, POLLOUT, 0};
        const int left = remaining_ms(deadline);
        if (left == 0 || poll(&p, 1, left) == 0) fail("timed out writing a request");
        continue;
      }
      fail(std::string("write failed: ") + std::strerror(errno));
    }
  };
  write_all(reinterpret_cast<const std::uint8_t*>(line.data()), line.size());
  if (payload) write_all(payload->data(), payload->size());
}

json ProcessAdapter::receive(const char* expected_type) {
  if (!alive()) throw AdapterError("adapter '" + command_ + "' is no longer running");
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      const std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json msg;
      try {
        msg = json::parse(line);
      } catch (const json::exception&) {
        fail("malformed reply: " + line.substr(0, 200));
      }
      if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        fail("reply without a type: " + line.substr(0, 200));
      }
      const std::string type = msg["type"];
      if (type == "error") fail("reported error: " + msg.value("message", std::string("?")));
      if (type != expected_type) {
        fail("expected '" + std::string(expected_type) + "' but got '" + type + "'");
      }
      return msg;
    }
    pollfd p{from_child_, POLLIN, 0};
    const int left = remaining_ms(deadline);
    const int ready = left == 0 ? 0 : poll(&p, 1, left);
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      fail("timed out after " + std::to_string(timeout_.count()) + " ms waiting for '" +
           expected_type + "'");
    }
    char chunk[4096];
    const ssize_t k = ::recv(from_child_, chunk, sizeof chunk, 0);
    if (k > 0) {
      buffer_.append(chunk, static_cast<std::size_t>(k));
    } else if (k == 0) {
      // Give the child a moment to be reaped so the status is reported.
      for (int i = 0; i < 50 && pid_ > 0; ++i) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          broken_ = true;
          kill_child();
          throw AdapterError("adapter '" + command_ + "' " + describe_status(status) +
                             " before replying");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      fail("closed its output");
    } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
      fail(std::string("read failed: ") + std::strerror(errno));
    }
  }
}

std::string ProcessAdapter::hello() {
  send({{"type", "hello"}, {"version", kProtocolVersion}});
  const json r = receive("ready");
  return r.value("name", std::string("unnamed"));
}

void ProcessAdapter::init(const Image& local, const Bbox& box) {
  const auto png = encode_png(local);
  send({{"type", "init"},
        {"width", local.width()},
        {"height", local.height()},
        {"bbox", bbox_to_json(box)},
        {"image_bytes", png.size()}},
       &png);
  receive("ok");
}

TrackResult ProcessAdapter::track(const Image& local) {
  const auto png = encode_png(local);
  send({{"type", "track"},
        {"width", local.width()},
        {"height", local.height()},
        {"image_bytes", png.size()}},
       &png);
  const json r = receive("result");
  TrackResult out;
  try {
    out.box = bbox_from_json(r.at("bbox"));
    out.score = r.value("score", 0.0);
  } catch (const std::exception& e) {
    fail(std::string("bad result: ") + e.what());
  }
  return out;
}

void ProcessAdapter::close() {
  if (!alive()) return;
  try {
    send({{"type", "bye"}});
  } catch (const AdapterError&) {
    return;
  }
  ::shutdown(to_child_, SHUT_WR);
  for (int i = 0; i < 100 && pid_ > 0; ++i) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  broken_ = true;
  kill_child();
}

std::optional<json> read_message(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return json::parse(line);
    } catch (const json::exception& e) {
      throw AdapterError(std::string("malformed message: ") + e.what());
    }
  }
  return std::nullopt;
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t n) {
  std::vector<std::uint8_t> bytes(n);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw AdapterError("truncated image payload");
  return bytes;
}

void write_message(std::ostream& out, const json& msg) {
  out << msg.dump() << '\n';
  out.flush();
}

json bbox_to_json(const Bbox& b) { return json::array({b.cx, b.cy, b.w, b.h, rad2deg(b.gamma)}); }

Bbox bbox_from_json(const json& j) {
  if (!j.is_array() || j.size() < 4 || j.size() > 5) {
    throw ValidationError("bbox must be an array of 4 or 5 numbers");
  }
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("bbox must be an array of 4 or 5 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(),
          j.size() == 5 ? deg2rad(j[4].get<double>()) : 0.0};
}

}  // namespace omni
