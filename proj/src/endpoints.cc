// Copyright 2026 The EgoAct Toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// POSIX transports for the line protocol.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <istream>
#include <ostream>

#include "egoact/error.h"
#include "egoact/runner.h"

namespace egoact {
namespace {

using Clock = std::chrono::steady_clock;

void WriteAll(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kProtocolError, std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

// Buffered line reader over a file descriptor with a deadline.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  // Returns false on EOF before a full line.
  bool ReadLine(std::string* line, double timeout_s) {
    const auto deadline =
        Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
    for (;;) {
      const auto pos = buffer_.find('\n');
      if (pos != std::string::npos) {
        *line = buffer_.substr(0, pos);
        if (!line->empty() && line->back() == '\r') line->pop_back();
        buffer_.erase(0, pos + 1);
        return true;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw Error(ErrorCode::kPolicyTimeout, "no reply within timeout");
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kProtocolError, std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw Error(ErrorCode::kProtocolError, std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

class FunctionEndpoint : public PolicyEndpoint {
 public:
  explicit FunctionEndpoint(LineHandler handler) : handler_(std::move(handler)) {}
  std::string Exchange(const std::string& line, double) override { return handler_(line); }

 private:
  LineHandler handler_;
};

class ProcessEndpoint : public PolicyEndpoint {
 public:
  explicit ProcessEndpoint(const std::string& command) {
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      throw Error(ErrorCode::kProtocolError, "pipe failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) throw Error(ErrorCode::kProtocolError, "fork failed");
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    reader_ = std::make_unique<LineReader>(out_);
    // A dead child must surface as a protocol error, not a signal.
    ::signal(SIGPIPE, SIG_IGN);
  }

  ~ProcessEndpoint() override {
    ::close(in_);
    ::close(out_);
    int status = 0;
    // Give the child a moment to exit on EOF before killing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
      ::usleep(2000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }

  std::string Exchange(const std::string& line, double timeout_s) override {
    WriteAll(in_, line + "\n");
    std::string reply;
    if (!reader_->ReadLine(&reply, timeout_s)) {
      throw Error(ErrorCode::kProtocolError, "policy process closed its output");
    }
    return reply;
  }

 private:
  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::unique_ptr<LineReader> reader_;
};

std::pair<std::string, std::string> SplitAddress(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw Error(ErrorCode::kProtocolError, "expected host:port, got " + address);
  }
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  return {host, address.substr(colon + 1)};
}

class TcpEndpoint : public PolicyEndpoint {
 public:
  explicit TcpEndpoint(const std::string& address) {
    const auto [host, port] = SplitAddress(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || res == nullptr) {
      throw Error(ErrorCode::kProtocolError, "cannot resolve " + address);
    }
    for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
      fd_ = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, p->ai_addr, p->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw Error(ErrorCode::kProtocolError, "cannot connect to " + address);
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    ::signal(SIGPIPE, SIG_IGN);
    reader_ = std::make_unique<LineReader>(fd_);
  }

  ~TcpEndpoint() override { ::close(fd_); }

  std::string Exchange(const std::string& line, double timeout_s) override {
    WriteAll(fd_, line + "\n");
    std::string reply;
    if (!reader_->ReadLine(&reply, timeout_s)) {
      throw Error(ErrorCode::kProtocolError, "policy server closed the connection");
    }
    return reply;
  }

 private:
  int fd_ = -1;
  std::unique_ptr<LineReader> reader_;
};

std::string ErrorReply(const std::string& message) {
  return nlohmann::json{{"version", kWireVersion}, {"error", message}}.dump();
}

std::string HandleSafely(const LineHandler& handler, const std::string& line) {
  try {
    return handler(line);
  } catch (const std::exception& e) {
    return ErrorReply(e.what());
  }
}

}  // namespace

std::unique_ptr<PolicyEndpoint> MakeFunctionEndpoint(LineHandler handler) {
  return std::make_unique<FunctionEndpoint>(std::move(handler));
}

std::unique_ptr<PolicyEndpoint> MakeProcessEndpoint(const std::string& command) {
  return std::make_unique<ProcessEndpoint>(command);
}

std::unique_ptr<PolicyEndpoint> MakeTcpEndpoint(const std::string& address) {
  return std::make_unique<TcpEndpoint>(address);
}

void ServeLines(std::istream& in, std::ostream& out, const LineHandler& handler) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << HandleSafely(handler, line) << '\n' << std::flush;
  }
}

void ServeTcp(int port, const LineHandler& handler, const std::function<void(int)>& on_listen,
              std::size_t max_connections) {
  const int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) throw Error(ErrorCode::kProtocolError, "socket failed");
  int one = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(server, 4) != 0) {
    ::close(server);
    throw Error(ErrorCode::kProtocolError, std::string("cannot listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(server, reinterpret_cast<sockaddr*>(&addr), &len);
  ::signal(SIGPIPE, SIG_IGN);
  if (on_listen) on_listen(ntohs(addr.sin_port));
  for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
    const int client = ::accept(server, nullptr, nullptr);
    if (client < 0) {
      if (errno == EINTR) continue;
      break;
    }
    LineReader reader(client);
    std::string line;
    try {
      while (reader.ReadLine(&line, 1e9)) {
        if (line.empty()) continue;
        WriteAll(client, HandleSafely(handler, line) + "\n");
      }
    } catch (const Error&) {
      // Client went away mid-line; serve the next one.
    }
    ::close(client);
  }
  ::close(server);
}

}  // namespace egoact
