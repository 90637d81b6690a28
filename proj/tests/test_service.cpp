#include "plplab/service.hpp"

#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "plplab/harness.hpp"

using namespace plplab;
using nlohmann::json;

namespace {

class Client {
public:
    explicit Client(std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        REQUIRE(fd_ >= 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    }
    ~Client() {
        if (fd_ >= 0) ::close(fd_);
    }

    void send_all(const std::string& data) {
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, 0);
            REQUIRE(n > 0);
            off += static_cast<std::size_t>(n);
        }
    }

    std::vector<std::string> read_lines(std::size_t count) {
        std::vector<std::string> lines;
        std::string current;
        char c;
        while (lines.size() < count) {
            const ssize_t n = ::recv(fd_, &c, 1, 0);
            REQUIRE(n == 1);
            if (c == '\n') {
                lines.push_back(current);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        return lines;
    }

private:
    int fd_ = -1;
};

const char* kRequest =
    R"({"group_id":"svc","completions":[{"length":100,"correct":true},{"length":100,"correct":false}]})";

}  // namespace

TEST_CASE("service replies per line and matches the batch path byte for byte") {
    service::ScoringServer server;
    server.start({});
    REQUIRE(server.port() != 0);

    Client client(server.port());
    client.send_all(std::string(kRequest) + "\n");
    const auto lines = client.read_lines(1);
    CHECK(lines[0] == harness::process_request_line(kRequest, 1));

    // Same connection, next line: stateless and ordered.
    client.send_all(std::string(kRequest) + "\n" + kRequest + "\n");
    const auto next = client.read_lines(2);
    CHECK(next[0].find("\"group_id\":\"svc\"") != std::string::npos);
    CHECK(next[0] == next[1]);
    server.stop();
}

TEST_CASE("malformed lines yield parse error objects and keep the connection open") {
    service::ScoringServer server;
    server.start({});
    Client client(server.port());
    client.send_all("this is not json\n");
    auto lines = client.read_lines(1);
    auto doc = json::parse(lines[0]);
    CHECK(doc["error"]["reason"] == "parse");

    // The connection survives the error.
    client.send_all(std::string(kRequest) + "\n");
    lines = client.read_lines(1);
    CHECK(json::parse(lines[0])["group_id"] == "svc");
    server.stop();
}

TEST_CASE("two concurrent connections get independent ordered streams") {
    service::ScoringServer server;
    server.start({});
    Client a(server.port());
    Client b(server.port());

    const std::string req_a =
        R"({"group_id":"conn-a","completions":[{"length":10,"correct":true},{"length":20,"correct":false}]})";
    const std::string req_b =
        R"({"group_id":"conn-b","completions":[{"length":30,"correct":false},{"length":40,"correct":true}]})";

    std::thread feeder([&] {
        for (int i = 0; i < 20; ++i) b.send_all(req_b + "\n");
    });
    for (int i = 0; i < 20; ++i) a.send_all(req_a + "\n");
    const auto lines_a = a.read_lines(20);
    feeder.join();
    const auto lines_b = b.read_lines(20);
    for (int i = 0; i < 20; ++i) {
        CHECK(json::parse(lines_a[i])["group_id"] == "conn-a");
        CHECK(json::parse(lines_b[i])["group_id"] == "conn-b");
    }
    server.stop();
}

TEST_CASE("oversized lines are rejected with an error object, connection stays open") {
    service::ScoringServer server;
    service::ScoringServer::Options options;
    options.max_line_bytes = 4096;
    server.start(options);
    Client client(server.port());

    const std::string big(10000, 'x');
    client.send_all(big + "\n");
    auto lines = client.read_lines(1);
    const auto doc = json::parse(lines[0]);
    CHECK(doc["error"]["reason"] == "oversized");

    client.send_all(std::string(kRequest) + "\n");
    lines = client.read_lines(1);
    CHECK(json::parse(lines[0])["group_id"] == "svc");
    server.stop();
}

TEST_CASE("bind failure reports an error") {
    service::ScoringServer first;
    first.start({});
    service::ScoringServer second;
    service::ScoringServer::Options clash;
    clash.port = first.port();
    CHECK_THROWS_AS(second.start(clash), std::runtime_error);
    first.stop();
}
