#include "plplab/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "plplab/harness.hpp"

namespace plplab::service {

namespace {

void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n <= 0) return;  // peer gone; nothing sensible left to do
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

ScoringServer::~ScoringServer() {
    stop();
}

void ScoringServer::start(const Options& options) {
    if (listen_fd_ != -1) throw std::runtime_error("server already started");
    max_line_bytes_ = options.max_line_bytes;

    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(options.port);
    if (::inet_pton(AF_INET, options.host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("invalid host address: " + options.host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const std::string msg = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("bind failed on " + options.host + ":" +
                                 std::to_string(options.port) + ": " + msg);
    }
    if (::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("listen() failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);

    stopping_ = false;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void ScoringServer::run(const Options& options) {
    start(options);
    accept_thread_.join();
}

void ScoringServer::stop() {
    if (listen_fd_ == -1) return;
    stopping_ = true;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    {
        std::lock_guard<std::mutex> lock(conn_mutex_);
        for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    std::vector<std::thread> threads;
    {
        std::lock_guard<std::mutex> lock(conn_mutex_);
        threads.swap(conn_threads_);
    }
    for (auto& t : threads) {
        if (t.joinable()) t.join();
    }
    listen_fd_ = -1;
}

void ScoringServer::accept_loop() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_) break;
            if (errno == EINTR) continue;
            break;
        }
        std::lock_guard<std::mutex> lock(conn_mutex_);
        conn_fds_.push_back(fd);
        conn_threads_.emplace_back([this, fd] { handle_connection(fd); });
    }
}

void ScoringServer::handle_connection(int fd) {
    // Per-connection framing: requests are processed strictly in line order,
    // one response line each. No state crosses lines.
    std::string buffer;
    bool discarding = false;  // inside an oversized line, waiting for '\n'
    int line_number = 0;
    char chunk[65536];
    for (;;) {
        const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0) break;
        for (ssize_t i = 0; i < n; ++i) {
            const char c = chunk[i];
            if (c == '\n') {
                if (discarding) {
                    discarding = false;  // oversized line already answered
                } else {
                    ++line_number;
                    if (!buffer.empty()) {
                        write_all(fd, harness::process_request_line(
                                          buffer, line_number) + "\n");
                    }
                }
                buffer.clear();
                continue;
            }
            if (discarding) continue;
            buffer.push_back(c);
            if (buffer.size() > max_line_bytes_) {
                ++line_number;
                harness::LineError error;
                error.line = line_number;
                error.reason = "oversized";
                error.message = "request line exceeds " +
                                std::to_string(max_line_bytes_) + " bytes";
                write_all(fd, harness::serialize_error(error) + "\n");
                buffer.clear();
                discarding = true;
            }
        }
    }
    ::close(fd);
}

}  // namespace plplab::service
