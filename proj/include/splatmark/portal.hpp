// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Verification portal: an in-process, disk-backed service simulation with an
// asset/key registry, per-principal query budgets, policy-truncated detection
// responses, keyed challenge viewpoints, and an append-only audit log. Key
// material never leaves the store: responses, errors and audit records are
// key-free by construction and byte-scanned for key hex in tests.

#ifndef SPLATMARK_PORTAL_HPP
#define SPLATMARK_PORTAL_HPP

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splatmark/attacks.hpp"
#include "splatmark/detect.hpp"
#include "splatmark/error.hpp"
#include "splatmark/fsutil.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/keying.hpp"
#include "splatmark/render.hpp"
#include "splatmark/watermark.hpp"

namespace splatmark {

enum class Truncation { FULL, DECISION_ONLY, DECISION_PLUS_ACCURACY };

inline std::string to_string(Truncation t) {
    switch (t) {
        case Truncation::FULL: return "FULL";
        case Truncation::DECISION_ONLY: return "DECISION_ONLY";
        case Truncation::DECISION_PLUS_ACCURACY: return "DECISION_PLUS_ACCURACY";
    }
    return "FULL";
}

inline Truncation truncation_from_string(const std::string& s) {
    if (s == "FULL") return Truncation::FULL;
    if (s == "DECISION_ONLY") return Truncation::DECISION_ONLY;
    if (s == "DECISION_PLUS_ACCURACY") return Truncation::DECISION_PLUS_ACCURACY;
    throw ConfigError("unknown truncation policy '" + s + "'");
}

enum class Role { VERIFIER, AUDITOR };

inline std::string to_string(Role r) { return r == Role::AUDITOR ? "AUDITOR" : "VERIFIER"; }

inline Role role_from_string(const std::string& s) {
    if (s == "VERIFIER") return Role::VERIFIER;
    if (s == "AUDITOR") return Role::AUDITOR;
    throw ConfigError("unknown principal role '" + s + "'");
}

struct PortalPolicy {
    std::size_t max_queries = 32;
    Truncation truncation = Truncation::DECISION_PLUS_ACCURACY;
    std::size_t challenge_view_count = 8;
};

inline void validate_policy(const PortalPolicy& p) {
    if (p.max_queries < 1) throw ConfigError("portal max_queries must be >= 1");
    if (p.challenge_view_count < 1) throw ConfigError("challenge view count must be >= 1");
}

struct AuditRecord {
    std::uint64_t sequence = 0;
    std::string principal;
    std::string asset;
    std::string request_digest;
    std::string outcome; // "ok" | "quota_error" | "not_found" | "auth_error"
    nlohmann::json truncated_result;
    std::string timestamp;
};

inline nlohmann::json audit_record_to_json(const AuditRecord& r) {
    return nlohmann::json{{"sequence", r.sequence},   {"principal", r.principal},
                          {"asset", r.asset},         {"request_digest", r.request_digest},
                          {"outcome", r.outcome},     {"result", r.truncated_result},
                          {"timestamp", r.timestamp}};
}

inline AuditRecord audit_record_from_json(const nlohmann::json& j) {
    AuditRecord r;
    r.sequence = j.at("sequence").get<std::uint64_t>();
    r.principal = j.at("principal").get<std::string>();
    r.asset = j.at("asset").get<std::string>();
    r.request_digest = j.at("request_digest").get<std::string>();
    r.outcome = j.at("outcome").get<std::string>();
    r.truncated_result = j.at("result");
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
}

struct VerifyResponse {
    nlohmann::json payload; // truncated per policy
    bool realigned = false;
    std::uint64_t audit_sequence = 0;
};

inline std::string sha256_hex(const void* data, std::size_t size) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr))
        throw DataError("SHA-256 evaluation failed");
    return to_hex(md, len);
}

inline std::string sha256_hex(const Bytes& bytes) { return sha256_hex(bytes.data(), bytes.size()); }

/// Disk-backed verification portal. All mutating and reading entry points are
/// serialized through one mutex; audit sequence numbers witness the order.
class Portal {
public:
    explicit Portal(std::string state_dir, PortalPolicy policy = {})
        : dir_(std::move(state_dir)), policy_(policy) {
        validate_policy(policy_);
        std::filesystem::create_directories(dir_);
        std::filesystem::create_directories(dir_ + "/blobs");
        if (std::filesystem::exists(state_path())) load_state();
    }

    const PortalPolicy& policy() const { return policy_; }

    /// Creates (or replaces) a principal with a full budget. Returns the
    /// credential token; pass a fixed token for reproducible test setups.
    std::string add_principal(const std::string& id, Role role, std::string token = "") {
        std::lock_guard<std::mutex> lock(mutex_);
        if (id.empty()) throw ConfigError("principal id must be non-empty");
        if (token.empty()) token = random_token();
        principals_[id] = PrincipalState{token, policy_.max_queries, role};
        save_state();
        return token;
    }

    std::size_t budget_remaining(const std::string& id) const {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto it = principals_.find(id);
        if (it == principals_.end()) throw NotFoundError("unknown principal '" + id + "'");
        return it->second.budget;
    }

    /// Stores the original scene, keys, claim and embed parameters under an
    /// opaque digest-derived id. Re-registering identical inputs returns the
    /// existing id (idempotent).
    std::string register_asset(const GaussianScene& original, const KeySet& keys,
                               const Claim& claim, const EmbedConfig& config) {
        std::lock_guard<std::mutex> lock(mutex_);
        validate_embed_config(config);
        const Bytes ply = save_ply(original);
        Bytes digest_input = ply;
        const std::string meta = claim.text + "|" + embed_config_json(config).dump();
        digest_input.insert(digest_input.end(), meta.begin(), meta.end());
        const std::string digest = sha256_hex(digest_input);
        const std::string id = "asset-" + digest.substr(0, 16);

        const auto it = assets_.find(id);
        if (it != assets_.end()) return id; // idempotent re-registration

        AssetState asset;
        asset.claim = claim.text;
        asset.config = config;
        asset.digest = digest;
        asset.keys = keys;
        assets_[id] = asset;
        write_file_atomic(dir_ + "/blobs/" + id + ".ply", ply);
        save_state();
        return id;
    }

    /// Runs informed detection for an authenticated principal, spending one
    /// query. Misshapen suspects are realigned automatically and the response
    /// notes that. Every attempt — including quota, auth, and lookup failures
    /// — appends exactly one audit record.
    VerifyResponse verify_model(const std::string& principal_id, const std::string& token,
                                const std::string& asset_id, const GaussianScene& suspect) {
        std::lock_guard<std::mutex> lock(mutex_);
        const std::string request_digest = suspect_digest(asset_id, suspect);

        auto pit = principals_.find(principal_id);
        if (pit == principals_.end() || pit->second.token != token) {
            append_audit(principal_id, asset_id, request_digest, "auth_error", {});
            throw AuthError("unknown principal or bad credential");
        }
        const auto ait = assets_.find(asset_id);
        if (ait == assets_.end()) {
            append_audit(principal_id, asset_id, request_digest, "not_found", {});
            throw NotFoundError("unknown asset '" + asset_id + "'");
        }
        if (pit->second.budget == 0) {
            append_audit(principal_id, asset_id, request_digest, "quota_error", {});
            throw QuotaError("query budget exhausted for principal '" + principal_id + "'");
        }

        const AssetState& asset = ait->second;
        const GaussianScene original = load_asset_scene(asset_id);
        bool realigned = false;
        GaussianScene aligned = suspect;
        if (suspect.size() != original.size() || suspect.sh_degree != original.sh_degree) {
            aligned = realign(original, suspect);
            realigned = true;
        }

        EmbedRecord record;
        record.claim = asset.claim;
        record.bit_count = asset.config.bit_count;
        record.alpha = asset.config.alpha;
        record.protocol = asset.config.protocol;
        record.band = asset.config.band;
        record.reference_bits = asset.config.reference_bits;
        const DetectionResult result =
            detect_model(original, aligned, asset.keys, record, DetectOptions{});

        pit->second.budget -= 1;
        VerifyResponse response;
        response.realigned = realigned;
        response.payload = truncate_result(result, realigned);
        response.audit_sequence =
            append_audit(principal_id, asset_id, request_digest, "ok", response.payload);
        save_state();
        return response;
    }

    /// Deterministic keyed challenge: `challenge_view_count` cameras on a
    /// sphere around the scene, looking at its center, derived from
    /// PRF(k_sel, nonce | "view").
    std::vector<Camera> challenge_viewpoints(const std::string& asset_id,
                                             const std::string& nonce) const {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto ait = assets_.find(asset_id);
        if (ait == assets_.end()) throw NotFoundError("unknown asset '" + asset_id + "'");
        const GaussianScene scene = load_asset_scene(asset_id);
        const Bbox box = scene_bbox(scene);
        const Vec3 center = box.center();
        const double diag = box.diagonal();
        const double radius = diag > 1e-9 ? 1.5 * diag : 1.0;

        PrfBitStream stream(ait->second.keys.k_sel, make_context(to_bytes(nonce), "view"));
        auto uniform = [&stream]() {
            return static_cast<double>(stream.next_bits(53)) * 0x1.0p-53;
        };
        std::vector<Camera> cameras;
        cameras.reserve(policy_.challenge_view_count);
        for (std::size_t i = 0; i < policy_.challenge_view_count; ++i) {
            const double z = 2.0 * uniform() - 1.0;
            const double phi = 2.0 * M_PI * uniform();
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            const Vec3 dir(s * std::cos(phi), s * std::sin(phi), z);
            const Vec3 pos = center + radius * dir;
            Vec3 up(0, 1, 0);
            if (std::abs(dir.dot(up)) > 0.999) up = Vec3(1, 0, 0);
            cameras.push_back(look_at(pos, center, up, 300.0, 256, 256, 0.05 * radius,
                                      10.0 * radius));
        }
        return cameras;
    }

    /// Complete append-only audit log; auditor role required.
    std::vector<AuditRecord> export_audit(const std::string& principal_id,
                                          const std::string& token) const {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto pit = principals_.find(principal_id);
        if (pit == principals_.end() || pit->second.token != token)
            throw AuthError("unknown principal or bad credential");
        if (pit->second.role != Role::AUDITOR)
            throw AuthError("audit export requires the AUDITOR role");
        std::vector<AuditRecord> records;
        if (!std::filesystem::exists(audit_path())) return records;
        std::ifstream in(audit_path());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            records.push_back(audit_record_from_json(nlohmann::json::parse(line)));
        }
        return records;
    }

private:
    struct PrincipalState {
        std::string token;
        std::size_t budget = 0;
        Role role = Role::VERIFIER;
    };
    struct AssetState {
        std::string claim;
        EmbedConfig config;
        std::string digest;
        KeySet keys;
    };

    std::string state_path() const { return dir_ + "/portal.json"; }
    std::string audit_path() const { return dir_ + "/audit.jsonl"; }

    static std::string random_token() {
        std::random_device rd;
        std::uint8_t raw[16];
        for (std::size_t i = 0; i < sizeof(raw); i += 4) {
            const std::uint32_t w = rd();
            std::memcpy(raw + i, &w, 4);
        }
        return to_hex(raw, sizeof(raw));
    }

    static nlohmann::json embed_config_json(const EmbedConfig& c) {
        return nlohmann::json{{"bit_count", c.bit_count},
                              {"alpha", c.alpha},
                              {"protocol", to_string(c.protocol)},
                              {"band", {{"lo", c.band.lo}, {"hi", c.band.hi}}},
                              {"capacity_floor", c.capacity_floor},
                              {"reference_bits", c.reference_bits}};
    }

    static EmbedConfig embed_config_from_state(const nlohmann::json& j) {
        EmbedConfig c;
        c.bit_count = j.at("bit_count").get<std::size_t>();
        c.alpha = j.at("alpha").get<double>();
        c.protocol = protocol_from_string(j.at("protocol").get<std::string>());
        c.band.lo = j.at("band").at("lo").get<double>();
        c.band.hi = j.at("band").at("hi").get<double>();
        c.capacity_floor = j.at("capacity_floor").get<std::size_t>();
        c.reference_bits = j.at("reference_bits").get<std::size_t>();
        return c;
    }

    GaussianScene load_asset_scene(const std::string& asset_id) const {
        return load_ply(read_file_bytes(dir_ + "/blobs/" + asset_id + ".ply"));
    }

    std::string suspect_digest(const std::string& asset_id, const GaussianScene& suspect) const {
        Bytes input = save_ply(suspect);
        input.insert(input.end(), asset_id.begin(), asset_id.end());
        return sha256_hex(input);
    }

    nlohmann::json truncate_result(const DetectionResult& r, bool realigned) const {
        switch (policy_.truncation) {
            case Truncation::DECISION_ONLY:
                return nlohmann::json{{"present", r.present}};
            case Truncation::DECISION_PLUS_ACCURACY:
                return nlohmann::json{{"present", r.present},
                                      {"bit_accuracy", r.bit_accuracy},
                                      {"realigned", realigned}};
            case Truncation::FULL: {
                nlohmann::json j = detection_to_json(r);
                j["realigned"] = realigned;
                return j;
            }
        }
        return nlohmann::json{{"present", r.present}};
    }

    static std::string now_iso8601() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::uint64_t append_audit(const std::string& principal, const std::string& asset,
                               const std::string& request_digest, const std::string& outcome,
                               const nlohmann::json& result) {
        AuditRecord record;
        record.sequence = ++next_sequence_;
        record.principal = principal;
        record.asset = asset;
        record.request_digest = request_digest;
        record.outcome = outcome;
        record.truncated_result = result;
        record.timestamp = now_iso8601();
        std::ofstream out(audit_path(), std::ios::app);
        if (!out) throw IoError("cannot append to audit log: " + audit_path());
        out << audit_record_to_json(record).dump() << '\n';
        save_state(); // persists the sequence counter
        return record.sequence;
    }

    void save_state() const {
        nlohmann::json principals = nlohmann::json::object();
        for (const auto& [id, p] : principals_)
            principals[id] = {{"token", p.token},
                              {"budget", p.budget},
                              {"role", to_string(p.role)}};
        nlohmann::json assets = nlohmann::json::object();
        for (const auto& [id, a] : assets_)
            assets[id] = {{"claim", a.claim},
                          {"config", embed_config_json(a.config)},
                          {"digest", a.digest},
                          {"keys", keyset_to_json(a.keys)}};
        const nlohmann::json state = {{"schema", "splatmark/portal-state/v1"},
                                      {"policy",
                                       {{"max_queries", policy_.max_queries},
                                        {"truncation", to_string(policy_.truncation)},
                                        {"challenge_view_count", policy_.challenge_view_count}}},
                                      {"principals", principals},
                                      {"assets", assets},
                                      {"next_sequence", next_sequence_}};
        write_file_atomic(state_path(), state.dump(2) + "\n");
    }

    void load_state() {
        nlohmann::json state;
        try {
            state = nlohmann::json::parse(read_file_text(state_path()));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("portal state " + state_path() + ": " + e.what());
        }
        if (state.value("schema", "") != "splatmark/portal-state/v1")
            throw SchemaError("unrecognized portal state schema");
        policy_.max_queries = state.at("policy").at("max_queries").get<std::size_t>();
        policy_.truncation =
            truncation_from_string(state.at("policy").at("truncation").get<std::string>());
        policy_.challenge_view_count =
            state.at("policy").at("challenge_view_count").get<std::size_t>();
        for (const auto& [id, p] : state.at("principals").items())
            principals_[id] = PrincipalState{p.at("token").get<std::string>(),
                                             p.at("budget").get<std::size_t>(),
                                             role_from_string(p.at("role").get<std::string>())};
        for (const auto& [id, a] : state.at("assets").items()) {
            AssetState asset;
            asset.claim = a.at("claim").get<std::string>();
            asset.config = embed_config_from_state(a.at("config"));
            asset.digest = a.at("digest").get<std::string>();
            asset.keys = keyset_from_json(a.at("keys"));
            assets_[id] = asset;
        }
        next_sequence_ = state.at("next_sequence").get<std::uint64_t>();
    }

    std::string dir_;
    PortalPolicy policy_;
    std::map<std::string, PrincipalState> principals_;
    std::map<std::string, AssetState> assets_;
    std::uint64_t next_sequence_ = 0;
    mutable std::mutex mutex_;
};

} // namespace splatmark

#endif // SPLATMARK_PORTAL_HPP
