// Online mode: the only translation unit that talks to the network.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

#include "icsthreat/error.hpp"
#include "icsthreat/nvd.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace icsthreat {

using detail::Json;

namespace {

std::string vendor_of(const std::string& cpe)
{
    // cpe:2.3:part:vendor:product:...
    std::size_t pos = 0;
    for (int field = 0; field < 3; ++field) {
        pos = cpe.find(':', pos);
        if (pos == std::string::npos) {
            return {};
        }
        ++pos;
    }
    std::string vendor = cpe.substr(pos, cpe.find(':', pos) - pos);
    std::replace(vendor.begin(), vendor.end(), '_', ' ');
    return vendor == "*" || vendor == "-" ? std::string() : vendor;
}

CveRecord record_from(const Json& cve, std::string_view keyword)
{
    CveRecord r;
    r.cve_id = cve.at("id").get<std::string>();
    if (!is_cve_id(r.cve_id)) {
        throw Error(ErrorCode::BadResponse, "malformed CVE id '" + r.cve_id + "'");
    }
    if (auto d = cve.find("descriptions"); d != cve.end()) {
        for (const auto& entry : *d) {
            if (entry.value("lang", "") == "en" || r.description.empty()) {
                r.description = entry.at("value").get<std::string>();
                if (entry.value("lang", "") == "en") {
                    break;
                }
            }
        }
    }
    if (auto m = cve.find("metrics"); m != cve.end()) {
        if (auto v31 = m->find("cvssMetricV31"); v31 != m->end() && !v31->empty()) {
            const Json* chosen = &v31->front();
            for (const auto& metric : *v31) {
                if (metric.value("type", "") == "Primary") {
                    chosen = &metric;
                    break;
                }
            }
            const Json& data = chosen->at("cvssData");
            r.base_score = data.at("baseScore").get<double>();
            if (data.contains("vectorString")) {
                r.vector_string = data.at("vectorString").get<std::string>();
            }
        }
    }
    std::set<std::string> vendors;
    if (auto configs = cve.find("configurations"); configs != cve.end()) {
        for (const auto& config : *configs) {
            for (const auto& node : config.value("nodes", Json::array())) {
                for (const auto& match : node.value("cpeMatch", Json::array())) {
                    std::string vendor = vendor_of(match.value("criteria", ""));
                    if (!vendor.empty()) {
                        vendors.insert(vendor);
                    }
                }
            }
        }
    }
    if (!keyword.empty()) {
        r.vendor_tags.push_back(detail::to_lower(keyword));
    }
    for (const auto& v : vendors) {
        if (std::find(r.vendor_tags.begin(), r.vendor_tags.end(), v) == r.vendor_tags.end()) {
            r.vendor_tags.push_back(v);
        }
    }
    return r;
}

std::string today_utc()
{
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

} // namespace

ApiPage parse_api_page(std::string_view body, std::string_view keyword)
{
    ApiPage page;
    try {
        Json root = Json::parse(body.begin(), body.end());
        page.total_results = root.at("totalResults").get<std::size_t>();
        page.timestamp = root.value("timestamp", "");
        for (const auto& item : root.at("vulnerabilities")) {
            page.records.push_back(record_from(item.at("cve"), keyword));
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::BadResponse, std::string("unexpected response shape: ") + e.what());
    }
    return page;
}

std::size_t fetch_remote(const FetchOptions& options)
{
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch parts;
    if (!std::regex_match(options.endpoint, parts, url)) {
        throw Error(ErrorCode::NetworkError, "endpoint must be an http(s) URL: '" + options.endpoint + "'");
    }
    const std::string base = parts[1];
    const std::string path = parts[2].matched ? std::string(parts[2]) : std::string("/");

    httplib::Client client(base);
    client.set_connection_timeout(options.timeout_seconds, 0);
    client.set_read_timeout(options.timeout_seconds, 0);
    client.set_follow_location(true);
    httplib::Headers headers;
    if (!options.api_key.empty()) {
        headers.emplace("apiKey", options.api_key);
    }

    std::vector<CveRecord> records;
    std::set<std::string> seen;
    std::string timestamp;
    std::size_t start = 0;
    while (true) {
        httplib::Params params{{"keywordSearch", options.keyword},
                               {"resultsPerPage", std::to_string(options.page_size)},
                               {"startIndex", std::to_string(start)}};
        auto result = client.Get(path, params, headers);
        if (!result) {
            throw Error(ErrorCode::NetworkError,
                        "request to " + options.endpoint + " failed: " + httplib::to_string(result.error()));
        }
        const int status = result->status;
        if (status == 403 || status == 429) {
            std::string message = "server answered HTTP " + std::to_string(status);
            if (result->has_header("Retry-After")) {
                message += ", retry after " + result->get_header_value("Retry-After") + " s";
            }
            throw Error(ErrorCode::RateLimited, message);
        }
        if (status != 200) {
            throw Error(ErrorCode::BadResponse, "server answered HTTP " + std::to_string(status));
        }
        ApiPage page = parse_api_page(result->body, options.keyword);
        if (timestamp.empty()) {
            timestamp = page.timestamp;
        }
        for (auto& r : page.records) {
            if (seen.insert(r.cve_id).second) {
                records.push_back(std::move(r));
            }
        }
        start += page.records.size();
        if (page.records.empty() || start >= page.total_results) {
            break;
        }
    }

    static const std::regex iso_date(R"(^\d{4}-\d{2}-\d{2})");
    std::string retrieved = std::regex_search(timestamp, iso_date) ? timestamp.substr(0, 10) : today_utc();
    const std::size_t count = records.size();
    const std::string text = write_feed(CveCatalog(std::move(records), options.endpoint, retrieved));

    namespace fs = std::filesystem;
    const fs::path target(options.output_path);
    fs::path temp = target;
    temp += ".part";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << text;
        out.close();
        if (!out) {
            std::error_code ignored;
            fs::remove(temp, ignored);
            throw Error(ErrorCode::IoError, "cannot write '" + temp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw Error(ErrorCode::IoError, "cannot move feed into '" + target.string() + "'");
    }
    return count;
}

} // namespace icsthreat
