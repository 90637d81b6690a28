#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace plplab::service {

// Newline-delimited JSON scoring service over a plain TCP stream: one
// GroupRequest per line in, one GroupResponse (or error object) per line out,
// in order per connection. Requests are stateless; connections are handled
// concurrently, each processed sequentially. Lines longer than
// max_line_bytes are answered with an "oversized" error object and skipped.
class ScoringServer {
public:
    struct Options {
        std::string host = "127.0.0.1";
        std::uint16_t port = 0;  // 0 picks an ephemeral port
        std::size_t max_line_bytes = 16ull * 1024 * 1024;
    };

    ScoringServer() = default;
    ~ScoringServer();

    ScoringServer(const ScoringServer&) = delete;
    ScoringServer& operator=(const ScoringServer&) = delete;

    // Binds and starts the accept loop in a background thread. Throws
    // std::runtime_error on bind failure.
    void start(const Options& options);

    // Blocks the calling thread in the accept loop (CLI mode).
    void run(const Options& options);

    void stop();

    std::uint16_t port() const { return port_; }

private:
    void accept_loop();
    void handle_connection(int fd);

    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::size_t max_line_bytes_ = 16ull * 1024 * 1024;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex conn_mutex_;
    std::vector<int> conn_fds_;
    std::vector<std::thread> conn_threads_;
};

}  // namespace plplab::service
