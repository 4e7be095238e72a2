#pragma once

// HTTP façade over sessions. Every mutating endpoint maps onto one session
// command; requests for one session are serialized by its own mutex.

#include <memory>
#include <string>

namespace socialsim {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    bool debug = false;
    std::string scenario_dir;
    std::string cors_origin = "*";
};

class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket; returns the bound port or -1.
    int bind();
    /// Serves until `stop()`. Call `bind()` first.
    void run();
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace socialsim
