#include "fedgraph/fed/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fedgraph/error.hpp"

namespace fedgraph::fed {

void Transcript::record(const std::string& frame) {
    std::lock_guard lock(mutex_);
    frames_.push_back(frame);
}

std::vector<std::string> Transcript::frames() const {
    std::lock_guard lock(mutex_);
    return frames_;
}

std::string Transcript::concatenated() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& f : frames_) out += f;
    return out;
}

// ---------------------------------------------------------------------------
// in-process transport
// ---------------------------------------------------------------------------

namespace {

struct FrameQueue {
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::string> frames;
    bool closed = false;

    void push(std::string frame) {
        {
            std::lock_guard lock(mutex);
            if (closed) return;
            frames.push_back(std::move(frame));
        }
        ready.notify_all();
    }

    // empty optional = deadline passed; throws when closed and drained
    std::optional<std::string> pop(Deadline deadline) {
        std::unique_lock lock(mutex);
        while (frames.empty()) {
            if (closed) raise(errc::connection_lost, "peer closed the channel");
            if (ready.wait_until(lock, deadline) == std::cv_status::timeout && frames.empty()) {
                if (closed) raise(errc::connection_lost, "peer closed the channel");
                return std::nullopt;
            }
        }
        std::string frame = std::move(frames.front());
        frames.pop_front();
        return frame;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        ready.notify_all();
    }
};

class QueueChannel : public Channel {
public:
    QueueChannel(std::shared_ptr<FrameQueue> in, std::shared_ptr<FrameQueue> out,
                 Transcript* transcript)
        : in_(std::move(in)), out_(std::move(out)), transcript_(transcript) {}

    ~QueueChannel() override { close(); }

    void send(const FedMessage& msg) override {
        std::string frame = encode_message(msg);
        if (transcript_) transcript_->record(frame);
        out_->push(std::move(frame));
    }

    std::optional<FedMessage> recv(Deadline deadline) override {
        auto frame = in_->pop(deadline);
        if (!frame) return std::nullopt;
        return decode_message(*frame);
    }

    void close() override {
        in_->close();
        out_->close();
    }

private:
    std::shared_ptr<FrameQueue> in_;
    std::shared_ptr<FrameQueue> out_;
    Transcript* transcript_;
};

} // namespace

struct InProcessHub::State {
    std::mutex mutex;
    std::condition_variable pending_ready;
    std::deque<std::unique_ptr<Channel>> pending; // aggregator ends of new connections
    Transcript* transcript = nullptr;
};

InProcessHub::InProcessHub(Transcript* transcript) : state_(std::make_shared<State>()) {
    state_->transcript = transcript;
}

InProcessHub::~InProcessHub() = default;

std::unique_ptr<Channel> InProcessHub::connect() {
    auto to_aggregator = std::make_shared<FrameQueue>();
    auto to_party = std::make_shared<FrameQueue>();
    auto party_end = std::make_unique<QueueChannel>(to_party, to_aggregator, state_->transcript);
    auto aggregator_end =
        std::make_unique<QueueChannel>(to_aggregator, to_party, state_->transcript);
    {
        std::lock_guard lock(state_->mutex);
        state_->pending.push_back(std::move(aggregator_end));
    }
    state_->pending_ready.notify_all();
    return party_end;
}

namespace {

class HubListener : public Listener {
public:
    explicit HubListener(std::shared_ptr<InProcessHub::State> state) : state_(std::move(state)) {}

    std::unique_ptr<Channel> accept(Deadline deadline) override {
        std::unique_lock lock(state_->mutex);
        while (state_->pending.empty()) {
            if (state_->pending_ready.wait_until(lock, deadline) == std::cv_status::timeout &&
                state_->pending.empty())
                return nullptr;
        }
        auto channel = std::move(state_->pending.front());
        state_->pending.pop_front();
        return channel;
    }

private:
    std::shared_ptr<InProcessHub::State> state_;
};

} // namespace

std::unique_ptr<Listener> InProcessHub::make_listener() {
    return std::make_unique<HubListener>(state_);
}

// ---------------------------------------------------------------------------
// socket transport
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
    raise(errc::connection_lost, what + ": " + std::strerror(errno));
}

int remaining_ms(Deadline deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left < 0) return 0;
    if (left > INT32_MAX) return INT32_MAX;
    return static_cast<int>(left);
}

class SocketChannel : public Channel {
public:
    SocketChannel(int fd, Transcript* transcript) : fd_(fd), transcript_(transcript) {
        try {
            int one = 1;
            ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            // each direction leads with a protocol version byte
            const char version = static_cast<char>(kProtocolVersion);
            write_all(&version, 1);
            char peer_version = 0;
            if (!read_all(&peer_version, 1, deadline_in(std::chrono::milliseconds(30000))))
                raise(errc::connection_lost, "peer sent no protocol version byte");
            if (peer_version != version)
                raise(errc::malformed_payload,
                      "unsupported protocol version " + std::to_string(int(peer_version)));
        } catch (...) {
            ::close(fd_);
            fd_ = -1;
            throw;
        }
    }

    ~SocketChannel() override { close(); }

    void send(const FedMessage& msg) override {
        std::string frame = encode_message(msg);
        if (transcript_) transcript_->record(frame);
        write_all(frame.data(), frame.size());
    }

    std::optional<FedMessage> recv(Deadline deadline) override {
        char header[4];
        int got = read_some(header, 4, deadline);
        if (got == 0) return std::nullopt; // nothing started before the deadline
        if (got < 4 && !read_rest(header, 4, got, deadline))
            raise(errc::malformed_payload, "connection ended inside a frame header");
        const auto b = [&](int i) { return static_cast<uint32_t>(static_cast<uint8_t>(header[i])); };
        const uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
        if (n > kMaxFrameBytes)
            raise(errc::frame_too_large,
                  "declared payload of " + std::to_string(n) + " bytes exceeds 64 MiB");
        std::string payload(n, '\0');
        if (n > 0 && !read_all(payload.data(), n, deadline))
            raise(errc::malformed_payload, "connection ended inside a frame payload");
        if (transcript_) {
            std::string frame(header, 4);
            frame += payload;
            transcript_->record(frame);
        }
        return decode_payload(payload);
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    void write_all(const char* data, size_t n) {
        size_t off = 0;
        while (off < n) {
            ssize_t w = ::write(fd_, data + off, n - off);
            if (w < 0) {
                if (errno == EINTR) continue;
                sys_fail("write");
            }
            off += static_cast<size_t>(w);
        }
    }

    // reads whatever arrives first; 0 = deadline hit before any byte
    int read_some(char* out, size_t n, Deadline deadline) {
        for (;;) {
            pollfd p{fd_, POLLIN, 0};
            int rv = ::poll(&p, 1, remaining_ms(deadline));
            if (rv < 0) {
                if (errno == EINTR) continue;
                sys_fail("poll");
            }
            if (rv == 0) return 0;
            ssize_t r = ::read(fd_, out, n);
            if (r < 0) {
                if (errno == EINTR) continue;
                sys_fail("read");
            }
            if (r == 0) raise(errc::connection_lost, "peer closed the connection");
            return static_cast<int>(r);
        }
    }

    bool read_rest(char* out, size_t n, size_t have, Deadline deadline) {
        while (have < n) {
            int r = read_some(out + have, n - have, deadline);
            if (r == 0) return false;
            have += static_cast<size_t>(r);
        }
        return true;
    }

    bool read_all(char* out, size_t n, Deadline deadline) { return read_rest(out, n, 0, deadline); }

    int fd_;
    Transcript* transcript_;
};

sockaddr_in make_addr(const std::string& host, uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        raise(errc::invalid_config, "bad IPv4 address '" + host + "'");
    return addr;
}

} // namespace

SocketListener::SocketListener(const std::string& host, uint16_t port, Transcript* transcript)
    : transcript_(transcript) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) sys_fail("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = make_addr(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) sys_fail("bind");
    if (::listen(fd_, 16) != 0) sys_fail("listen");
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) sys_fail("getsockname");
    port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> SocketListener::accept(Deadline deadline) {
    for (;;) {
        pollfd p{fd_, POLLIN, 0};
        int rv = ::poll(&p, 1, remaining_ms(deadline));
        if (rv < 0) {
            if (errno == EINTR) continue;
            sys_fail("poll");
        }
        if (rv == 0) return nullptr;
        int conn = ::accept(fd_, nullptr, nullptr);
        if (conn < 0) {
            if (errno == EINTR) continue;
            sys_fail("accept");
        }
        return std::make_unique<SocketChannel>(conn, transcript_);
    }
}

std::unique_ptr<Channel> socket_connect(const std::string& host, uint16_t port,
                                        Transcript* transcript) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) sys_fail("socket");
    sockaddr_in addr = make_addr(host, port);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        int err = errno;
        ::close(fd);
        errno = err;
        sys_fail("connect");
    }
    return std::make_unique<SocketChannel>(fd, transcript);
}

} // namespace fedgraph::fed
