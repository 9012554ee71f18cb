#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fedgraph/fed/messages.hpp"

namespace fedgraph::fed {

using Deadline = std::chrono::steady_clock::time_point;

inline Deadline deadline_in(std::chrono::milliseconds ms) {
    return std::chrono::steady_clock::now() + ms;
}

/// Every frame that crosses a transport, both directions, in arrival order.
/// The privacy suite scans this byte-for-byte.
class Transcript {
public:
    void record(const std::string& frame);
    std::vector<std::string> frames() const;
    std::string concatenated() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> frames_;
};

/// Bidirectional ordered message stream. Both implementations move the same
/// encoded frames, so runs are transport-interchangeable.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(const FedMessage& msg) = 0;
    /// Blocks for one message; nullopt once the deadline passes.
    /// Throws Error(ConnectionLost) when the peer is gone.
    virtual std::optional<FedMessage> recv(Deadline deadline) = 0;
    virtual void close() = 0;
};

class Listener {
public:
    virtual ~Listener() = default;
    /// Next inbound connection; nullopt once the deadline passes.
    virtual std::unique_ptr<Channel> accept(Deadline deadline) = 0;
};

// ---------------------------------------------------------------------------
// in-process transport
// ---------------------------------------------------------------------------

/// Connects party threads to an aggregator thread through frame queues.
/// Frames still pass through the codec so the transcript and the float
/// round-trip behaviour match the socket transport exactly.
class InProcessHub {
public:
    explicit InProcessHub(Transcript* transcript = nullptr);
    ~InProcessHub();

    /// Party side: returns the party's channel end and queues the peer end
    /// for the aggregator's listener.
    std::unique_ptr<Channel> connect();

    /// Aggregator side.
    std::unique_ptr<Listener> make_listener();

private:
    struct State;
    std::shared_ptr<State> state_;
};

// ---------------------------------------------------------------------------
// socket transport (TCP, length-prefixed frames, version byte first)
// ---------------------------------------------------------------------------

class SocketListener : public Listener {
public:
    /// Binds host:port; port 0 picks an ephemeral port.
    SocketListener(const std::string& host, uint16_t port, Transcript* transcript = nullptr);
    ~SocketListener() override;

    uint16_t port() const { return port_; }
    std::unique_ptr<Channel> accept(Deadline deadline) override;

private:
    int fd_ = -1;
    uint16_t port_ = 0;
    Transcript* transcript_ = nullptr;
};

/// Connects to an aggregator socket.
std::unique_ptr<Channel> socket_connect(const std::string& host, uint16_t port,
                                        Transcript* transcript = nullptr);

} // namespace fedgraph::fed
