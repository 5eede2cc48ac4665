#pragma once

// Local stand-in for the CVE API 2.0 keyword search, served on 127.0.0.1.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mocknvd {

struct MockCve {
    std::string id;
    std::string description;
    double score;
    std::string vector;
    std::string cpe_vendor;
};

inline nlohmann::json vulnerability(const MockCve& c)
{
    nlohmann::json cve = {
        {"id", c.id},
        {"descriptions", {{{"lang", "es"}, {"value", "descripcion"}}, {{"lang", "en"}, {"value", c.description}}}},
        {"metrics",
         {{"cvssMetricV31",
           {{{"source", "other@example.org"},
             {"type", "Secondary"},
             {"cvssData", {{"baseScore", 1.0}, {"vectorString", "CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:L/I:N/A:N"}}}},
            {{"source", "nvd@nist.gov"},
             {"type", "Primary"},
             {"cvssData", {{"baseScore", c.score}, {"vectorString", c.vector}}}}}}}},
        {"configurations",
         {{{"nodes",
            {{{"cpeMatch",
               {{{"vulnerable", true}, {"criteria", "cpe:2.3:o:" + c.cpe_vendor + ":firmware:1.0:*:*:*:*:*:*:*"}}}}}}}}}},
    };
    return {{"cve", cve}};
}

/// Serves `cves` page by page; `status` other than 200 is answered instead.
class Server {
public:
    explicit Server(std::vector<MockCve> cves, int status = 200) : cves_(std::move(cves)), status_(status)
    {
        server_.Get("/rest/json/cves/2.0", [this](const httplib::Request& req, httplib::Response& res) {
            {
                std::lock_guard lock(mutex_);
                requests_.push_back(req.params.count("startIndex") ? req.get_param_value("startIndex") : "");
                api_keys_.push_back(req.get_header_value("apiKey"));
                keywords_.push_back(req.get_param_value("keywordSearch"));
            }
            if (status_ != 200) {
                res.status = status_;
                if (status_ == 403) {
                    res.set_header("Retry-After", "30");
                }
                res.set_content("{\"message\": \"denied\"}", "application/json");
                return;
            }
            std::size_t start = std::stoul(req.get_param_value("startIndex"));
            std::size_t per_page = std::stoul(req.get_param_value("resultsPerPage"));
            nlohmann::json vulns = nlohmann::json::array();
            for (std::size_t i = start; i < cves_.size() && i < start + per_page; ++i) {
                vulns.push_back(vulnerability(cves_[i]));
            }
            nlohmann::json body = {{"resultsPerPage", vulns.size()},
                                   {"startIndex", start},
                                   {"totalResults", cves_.size()},
                                   {"format", "NVD_CVE"},
                                   {"version", "2.0"},
                                   {"timestamp", "2024-05-06T07:08:09.123"},
                                   {"vulnerabilities", vulns}};
            res.set_content(body.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~Server()
    {
        server_.stop();
        thread_.join();
    }

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/rest/json/cves/2.0"; }

    std::vector<std::string> start_indices() const
    {
        std::lock_guard lock(mutex_);
        return requests_;
    }
    std::vector<std::string> api_keys() const
    {
        std::lock_guard lock(mutex_);
        return api_keys_;
    }
    std::vector<std::string> keywords() const
    {
        std::lock_guard lock(mutex_);
        return keywords_;
    }

private:
    std::vector<MockCve> cves_;
    int status_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<std::string> requests_;
    std::vector<std::string> api_keys_;
    std::vector<std::string> keywords_;
};

/// An endpoint on a port nothing listens on.
inline std::string dead_endpoint()
{
    // Bind without listening, then release: connections get refused.
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    socklen_t len = sizeof addr;
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    const int port = ntohs(addr.sin_port);
    return "http://127.0.0.1:" + std::to_string(port) + "/rest/json/cves/2.0";
}

inline std::vector<MockCve> schneider_pair()
{
    return {
        {"CVE-2024-0001", "Remote code execution in an RTU web server.", 9.8,
         "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", "schneider-electric"},
        {"CVE-2024-0002", "Denial of service in a PLC Modbus stack.", 7.5,
         "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:H", "schneider_electric"},
    };
}

} // namespace mocknvd
