#pragma once

#include "safeml/csv.hpp"
#include "safeml/error.hpp"
#include "safeml/tabular.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace safeml {

enum class ResponseKind { raw_regression, probability };

/// The surrogate contract: a deterministic batch map from schema-conformant
/// rows to one real response per row.
class PredictionOracle {
public:
    virtual ~PredictionOracle() = default;

    virtual ResponseKind response_kind() const = 0;

    /// `cells` is row-major with `schema.size()` cells per row; categorical
    /// cells are level indices into `schema`.
    virtual std::vector<double> predict(const Schema& schema, std::span<const double> cells,
                                        std::size_t rows) const = 0;

    /// Whether predict may be called from several threads at once.
    virtual bool concurrent() const { return true; }
};

/// Calls the oracle and checks the reply: one finite value per row, inside
/// [0,1] for probability oracles.
inline std::vector<double> predict_batch(const PredictionOracle& oracle, const Schema& schema,
                                         std::span<const double> cells, std::size_t rows)
{
    if (cells.size() != rows * schema.size())
        fail(ErrorCode::invalid_argument, "cell count does not match rows x schema");
    auto out = oracle.predict(schema, cells, rows);
    if (out.size() != rows)
        fail(ErrorCode::oracle_failure,
             "oracle returned " + std::to_string(out.size()) + " values for " + std::to_string(rows) + " rows");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i]))
            fail(ErrorCode::non_finite_output, "row " + std::to_string(i));
        if (oracle.response_kind() == ResponseKind::probability && (out[i] < 0.0 || out[i] > 1.0))
            fail(ErrorCode::non_finite_output,
                 "probability " + csv::format_number(out[i]) + " outside [0,1] at row " + std::to_string(i));
    }
    return out;
}

inline std::vector<double> predict_batch(const PredictionOracle& oracle, const Dataset& data)
{
    return predict_batch(oracle, data.schema(), data.cells(), data.n());
}

class ConstantOracle final : public PredictionOracle {
public:
    explicit ConstantOracle(double value, ResponseKind kind = ResponseKind::raw_regression)
        : value_(value), kind_(kind)
    {
    }
    ResponseKind response_kind() const override { return kind_; }
    std::vector<double> predict(const Schema&, std::span<const double>, std::size_t rows) const override
    {
        return std::vector<double>(rows, value_);
    }

private:
    double value_;
    ResponseKind kind_;
};

/// Row-wise oracle from a callable `double(std::span<const double> row)`.
class FunctionOracle final : public PredictionOracle {
public:
    using RowFn = std::function<double(std::span<const double>)>;

    explicit FunctionOracle(RowFn fn, ResponseKind kind = ResponseKind::raw_regression)
        : fn_(std::move(fn)), kind_(kind)
    {
    }
    ResponseKind response_kind() const override { return kind_; }
    std::vector<double> predict(const Schema& schema, std::span<const double> cells,
                                std::size_t rows) const override
    {
        const std::size_t p = schema.size();
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i)
            out[i] = fn_(cells.subspan(i * p, p));
        return out;
    }

private:
    RowFn fn_;
    ResponseKind kind_;
};

/// Surrogate served by a child process over a line protocol on its standard
/// input/output:
///
///     PREDICT <m> <p>            request header
///     <m lines of p CSV cells>   numerics as shortest decimals, categoricals as labels
///     <m lines, one decimal>     reply
///     QUIT                       sent once on destruction
///
/// The child is started once and reused; calls are serialized.
class ExternalOracle final : public PredictionOracle {
public:
    ExternalOracle(const std::string& command, ResponseKind kind) : kind_(kind)
    {
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
            fail(ErrorCode::launch_failure, std::string("socketpair: ") + std::strerror(errno));
        pid_ = ::fork();
        if (pid_ < 0) {
            ::close(fds[0]);
            ::close(fds[1]);
            fail(ErrorCode::launch_failure, std::string("fork: ") + std::strerror(errno));
        }
        if (pid_ == 0) {
            ::dup2(fds[1], STDIN_FILENO);
            ::dup2(fds[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(fds[1]);
        fd_ = fds[0];
    }

    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

    ~ExternalOracle() override
    {
        if (fd_ >= 0) {
            static constexpr char quit[] = "QUIT\n";
            ::send(fd_, quit, sizeof(quit) - 1, MSG_NOSIGNAL);
            ::shutdown(fd_, SHUT_WR);
            ::close(fd_);
        }
        if (pid_ > 0)
            reap();
    }

    ResponseKind response_kind() const override { return kind_; }
    bool concurrent() const override { return false; }

    std::vector<double> predict(const Schema& schema, std::span<const double> cells,
                                std::size_t rows) const override
    {
        std::lock_guard lock(mutex_);
        const std::size_t p = schema.size();
        std::vector<double> out;
        out.reserve(rows);
        // Bounded requests keep a child that answers while still reading from
        // blocking on a full socket buffer.
        for (std::size_t begin = 0; begin < rows; begin += max_batch) {
            const std::size_t count = std::min(max_batch, rows - begin);
            request(schema, cells.subspan(begin * p, count * p), count, out);
        }
        return out;
    }

    static constexpr std::size_t max_batch = 1024;

private:
    void request(const Schema& schema, std::span<const double> cells, std::size_t rows,
                 std::vector<double>& out) const
    {
        const std::size_t p = schema.size();
        std::ostringstream msg;
        msg << "PREDICT " << rows << ' ' << p << '\n';
        for (std::size_t i = 0; i < rows; ++i) {
            auto row = cells.subspan(i * p, p);
            for (std::size_t j = 0; j < p; ++j) {
                if (j)
                    msg << ',';
                csv::write_field(msg, cell_text(schema, row, j));
            }
            msg << '\n';
        }
        send_all(msg.str());
        for (std::size_t i = 0; i < rows; ++i) {
            auto line = read_line();
            if (!line)
                fail(ErrorCode::oracle_failure, "child closed its output after " + std::to_string(i) + " of " +
                                                    std::to_string(rows) + " replies" + exit_note());
            ++line_no_;
            auto v = csv::parse_number(*line);
            if (!v)
                fail(ErrorCode::protocol_violation,
                     "reply line " + std::to_string(line_no_) + ": '" + *line + "' is not a finite decimal");
            out.push_back(*v);
        }
    }

    void send_all(std::string_view data) const
    {
        while (!data.empty()) {
            ssize_t k = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
            if (k < 0) {
                if (errno == EINTR)
                    continue;
                fail(ErrorCode::oracle_failure, std::string("write to child failed: ") + std::strerror(errno) +
                                                    exit_note());
            }
            data.remove_prefix(static_cast<std::size_t>(k));
        }
    }

    std::optional<std::string> read_line() const
    {
        for (;;) {
            if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r')
                    line.pop_back();
                return line;
            }
            char chunk[4096];
            ssize_t k = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (k < 0 && errno == EINTR)
                continue;
            if (k <= 0)
                return std::nullopt;
            buffer_.append(chunk, static_cast<std::size_t>(k));
        }
    }

    std::string exit_note() const
    {
        int status = 0;
        for (int attempt = 0; attempt < 50; ++attempt) {
            pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                pid_ = -1;
                if (WIFEXITED(status))
                    return " (child exited with status " + std::to_string(WEXITSTATUS(status)) + ")";
                if (WIFSIGNALED(status))
                    return " (child killed by signal " + std::to_string(WTERMSIG(status)) + ")";
                return "";
            }
            if (r < 0)
                return "";
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        return "";
    }

    void reap() const
    {
        int status = 0;
        for (int attempt = 0; attempt < 100; ++attempt) {
            if (::waitpid(pid_, &status, WNOHANG) != 0)
                return;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
    }

    ResponseKind kind_;
    int fd_ = -1;
    mutable pid_t pid_ = -1;
    mutable std::mutex mutex_;
    mutable std::string buffer_;
    mutable std::size_t line_no_ = 0;
};

inline std::unique_ptr<ExternalOracle> open_external_oracle(const std::string& command, ResponseKind kind)
{
    if (command.empty())
        fail(ErrorCode::launch_failure, "empty oracle command");
    return std::make_unique<ExternalOracle>(command, kind);
}

} // namespace safeml
