// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Portal service simulation: idempotent registration, budget enforcement,
// audit completeness and ordering, response truncation policies, keyed
// challenge viewpoints, key-hex redaction, and state persistence across
// process restarts (modeled by re-instantiating over the same directory).

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "splatmark/fsutil.hpp"
#include "splatmark/portal.hpp"

namespace sm = splatmark;

namespace {

struct Fixture {
    sm::GaussianScene original;
    sm::GaussianScene marked;
    sm::KeySet keys;
    sm::Claim claim{"asset: portal fixture"};
    sm::EmbedConfig config;

    Fixture() {
        original = sm::synth_scene(41, 2048, 1, 1.0);
        keys = sm::generate_keyset(7);
        config.bit_count = 16;
        config.alpha = 0.01;
        auto [scene, record] = sm::embed(original, keys, claim, config);
        marked = std::move(scene);
        (void)record;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

/// Fresh per-test state directory; wiped so reruns start from nothing.
std::string fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "splatmark-portal-tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir.parent_path());
    return dir.string();
}

} // namespace

TEST(Portal, RegistrationIsIdempotentAndContentAddressed) {
    const Fixture& f = fixture();
    sm::Portal portal(fresh_dir("register"));
    const std::string id = portal.register_asset(f.original, f.keys, f.claim, f.config);
    EXPECT_EQ(id.rfind("asset-", 0), 0u);
    EXPECT_EQ(id.size(), 6u + 16u);
    EXPECT_EQ(portal.register_asset(f.original, f.keys, f.claim, f.config), id);

    sm::Claim other{"asset: different claim"};
    const std::string id2 = portal.register_asset(f.original, f.keys, other, f.config);
    EXPECT_NE(id2, id);

    sm::EmbedConfig strong = f.config;
    strong.alpha = 0.02;
    EXPECT_NE(portal.register_asset(f.original, f.keys, f.claim, strong), id);
}

TEST(Portal, VerifyHappyPathSpendsBudget) {
    const Fixture& f = fixture();
    sm::Portal portal(fresh_dir("verify"));
    const std::string token = portal.add_principal("studio", sm::Role::VERIFIER, "tok-studio");
    EXPECT_EQ(token, "tok-studio");
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    const std::size_t before = portal.budget_remaining("studio");
    const sm::VerifyResponse r = portal.verify_model("studio", token, asset, f.marked);
    EXPECT_EQ(portal.budget_remaining("studio"), before - 1);
    EXPECT_FALSE(r.realigned);
    EXPECT_GE(r.audit_sequence, 1u);

    // Default policy truncates to decision + accuracy, nothing else.
    ASSERT_EQ(r.payload.size(), 3u);
    EXPECT_TRUE(r.payload.at("present").get<bool>());
    EXPECT_DOUBLE_EQ(r.payload.at("bit_accuracy").get<double>(), 1.0);
    EXPECT_FALSE(r.payload.at("realigned").get<bool>());

    // An unmarked suspect is rejected through the same path.
    const sm::VerifyResponse clean = portal.verify_model("studio", token, asset, f.original);
    EXPECT_FALSE(clean.payload.at("present").get<bool>());
}

TEST(Portal, BudgetExhaustionIsAuditedAndThrown) {
    const Fixture& f = fixture();
    sm::PortalPolicy policy;
    policy.max_queries = 3;
    sm::Portal portal(fresh_dir("budget"), policy);
    portal.add_principal("probe", sm::Role::VERIFIER, "tok-probe");
    const std::string auditor = portal.add_principal("iaud", sm::Role::AUDITOR, "tok-aud");
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    for (int i = 0; i < 3; ++i)
        EXPECT_NO_THROW(portal.verify_model("probe", "tok-probe", asset, f.marked));
    EXPECT_EQ(portal.budget_remaining("probe"), 0u);
    EXPECT_THROW(portal.verify_model("probe", "tok-probe", asset, f.marked), sm::QuotaError);
    EXPECT_THROW(portal.verify_model("probe", "tok-probe", asset, f.marked), sm::QuotaError);

    const auto records = portal.export_audit("iaud", auditor);
    ASSERT_EQ(records.size(), 5u); // one record per attempt, success or not
    for (int i = 0; i < 3; ++i) EXPECT_EQ(records[static_cast<std::size_t>(i)].outcome, "ok");
    EXPECT_EQ(records[3].outcome, "quota_error");
    EXPECT_EQ(records[4].outcome, "quota_error");
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(records[i].sequence, i + 1); // strictly monotonic, gap-free
        EXPECT_EQ(records[i].principal, "probe");
        EXPECT_EQ(records[i].asset, asset);
        EXPECT_FALSE(records[i].request_digest.empty());
        EXPECT_FALSE(records[i].timestamp.empty());
    }
}

TEST(Portal, AuthAndLookupFailuresAreAudited) {
    const Fixture& f = fixture();
    sm::Portal portal(fresh_dir("auth"));
    portal.add_principal("legit", sm::Role::VERIFIER, "tok-legit");
    const std::string auditor = portal.add_principal("aud", sm::Role::AUDITOR, "tok-aud");
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    EXPECT_THROW(portal.verify_model("legit", "wrong-token", asset, f.marked), sm::AuthError);
    EXPECT_THROW(portal.verify_model("ghost", "tok", asset, f.marked), sm::AuthError);
    EXPECT_THROW(portal.verify_model("legit", "tok-legit", "asset-0000000000000000", f.marked),
                 sm::NotFoundError);
    EXPECT_EQ(portal.budget_remaining("legit"), portal.policy().max_queries); // nothing spent

    const auto records = portal.export_audit("aud", auditor);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[0].outcome, "auth_error");
    EXPECT_EQ(records[1].outcome, "auth_error");
    EXPECT_EQ(records[2].outcome, "not_found");

    // The audit log itself is privileged.
    EXPECT_THROW(portal.export_audit("legit", "tok-legit"), sm::AuthError);
    EXPECT_THROW(portal.export_audit("aud", "bad"), sm::AuthError);
    EXPECT_THROW(portal.budget_remaining("ghost"), sm::NotFoundError);
}

TEST(Portal, TruncationPolicies) {
    const Fixture& f = fixture();
    sm::PortalPolicy decision;
    decision.truncation = sm::Truncation::DECISION_ONLY;
    sm::Portal p1(fresh_dir("trunc-decision"), decision);
    p1.add_principal("v", sm::Role::VERIFIER, "t");
    const std::string a1 = p1.register_asset(f.original, f.keys, f.claim, f.config);
    const sm::VerifyResponse r1 = p1.verify_model("v", "t", a1, f.marked);
    ASSERT_EQ(r1.payload.size(), 1u); // nothing but the decision
    EXPECT_TRUE(r1.payload.at("present").get<bool>());

    sm::PortalPolicy full;
    full.truncation = sm::Truncation::FULL;
    sm::Portal p2(fresh_dir("trunc-full"), full);
    p2.add_principal("v", sm::Role::VERIFIER, "t");
    const std::string a2 = p2.register_asset(f.original, f.keys, f.claim, f.config);
    const sm::VerifyResponse r2 = p2.verify_model("v", "t", a2, f.marked);
    EXPECT_TRUE(r2.payload.contains("presence_score"));
    EXPECT_TRUE(r2.payload.contains("normalized_margin"));
    EXPECT_TRUE(r2.payload.contains("correlations"));
    EXPECT_TRUE(r2.payload.contains("realigned"));
    EXPECT_EQ(r2.payload.at("correlations").size(), f.config.bit_count);
    EXPECT_EQ(r2.payload.at("decoded_bits").size(), f.config.bit_count);
}

TEST(Portal, AutoRealignsShapeMismatchedSuspects) {
    const Fixture& f = fixture();
    sm::Portal portal(fresh_dir("realign"));
    portal.add_principal("v", sm::Role::VERIFIER, "t");
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    sm::GaussianScene cropped = f.marked;
    cropped.gaussians.erase(cropped.gaussians.begin() + 100,
                            cropped.gaussians.begin() + 120);
    const sm::VerifyResponse r = portal.verify_model("v", "t", asset, cropped);
    EXPECT_TRUE(r.realigned);
    EXPECT_TRUE(r.payload.at("realigned").get<bool>());
    EXPECT_TRUE(r.payload.at("present").get<bool>());
    EXPECT_GT(r.payload.at("bit_accuracy").get<double>(), 0.9);
}

TEST(Portal, ChallengeViewpointsAreKeyedAndDeterministic) {
    const Fixture& f = fixture();
    sm::PortalPolicy policy;
    policy.challenge_view_count = 5;
    sm::Portal portal(fresh_dir("challenge"), policy);
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    const auto views_a = portal.challenge_viewpoints(asset, "nonce-1");
    const auto views_b = portal.challenge_viewpoints(asset, "nonce-1");
    const auto views_c = portal.challenge_viewpoints(asset, "nonce-2");
    ASSERT_EQ(views_a.size(), 5u);
    for (std::size_t i = 0; i < views_a.size(); ++i)
        EXPECT_EQ(sm::camera_to_json(views_a[i]).dump(), sm::camera_to_json(views_b[i]).dump());
    EXPECT_NE(sm::camera_to_json(views_a[0]).dump(), sm::camera_to_json(views_c[0]).dump());

    // All cameras sit on the challenge sphere and look at the scene center.
    // The portal works from its stored blob, i.e. the float32 PLY round trip.
    const sm::Bbox box = sm::scene_bbox(sm::load_ply(sm::save_ply(f.original)));
    const double radius = 1.5 * box.diagonal();
    for (const sm::Camera& cam : views_a) {
        EXPECT_NO_THROW(sm::validate_camera(cam));
        EXPECT_NEAR((cam.position - box.center()).norm(), radius, 1e-9);
        const sm::Vec3 forward = cam.rotation().col(2);
        const sm::Vec3 expect = (box.center() - cam.position).normalized();
        EXPECT_NEAR((forward - expect).norm(), 0.0, 1e-9);
    }

    EXPECT_THROW(portal.challenge_viewpoints("asset-ffffffffffffffff", "n"), sm::NotFoundError);
}

TEST(Portal, ResponsesAuditAndErrorsNeverLeakKeyHex) {
    const Fixture& f = fixture();
    const std::string dir = fresh_dir("redaction");
    sm::Portal portal(dir);
    portal.add_principal("v", sm::Role::VERIFIER, "t");
    const std::string auditor = portal.add_principal("a", sm::Role::AUDITOR, "tok-a");
    const std::string asset = portal.register_asset(f.original, f.keys, f.claim, f.config);

    std::vector<std::string> outputs;
    outputs.push_back(portal.verify_model("v", "t", asset, f.marked).payload.dump());
    outputs.push_back(portal.verify_model("v", "t", asset, f.original).payload.dump());
    try {
        portal.verify_model("v", "bad", asset, f.marked);
    } catch (const sm::Error& e) {
        outputs.emplace_back(e.what());
    }
    try {
        portal.verify_model("v", "t", "asset-0123456789abcdef", f.marked);
    } catch (const sm::Error& e) {
        outputs.emplace_back(e.what());
    }
    for (const auto& cam : portal.challenge_viewpoints(asset, "nonce"))
        outputs.push_back(sm::camera_to_json(cam).dump());
    for (const auto& rec : portal.export_audit("a", auditor))
        outputs.push_back(sm::audit_record_to_json(rec).dump());
    outputs.push_back(sm::read_file_text(dir + "/audit.jsonl"));

    const nlohmann::json key_json = sm::keyset_to_json(f.keys);
    const std::vector<std::string> hexes = {key_json.at("k_sel").get<std::string>(),
                                            key_json.at("k_code").get<std::string>(),
                                            key_json.at("k_seq").get<std::string>()};
    for (const std::string& out : outputs)
        for (const std::string& hex : hexes)
            EXPECT_EQ(out.find(hex), std::string::npos) << "key hex leaked: " << out;

    // Sanity for the scan itself: the private state store must hold the keys,
    // so the hex strings we searched for are the real ones.
    const std::string state = sm::read_file_text(dir + "/portal.json");
    for (const std::string& hex : hexes) EXPECT_NE(state.find(hex), std::string::npos);
}

TEST(Portal, StatePersistsAcrossReinstantiation) {
    const Fixture& f = fixture();
    const std::string dir = fresh_dir("persist");
    std::string asset;
    sm::PortalPolicy policy;
    policy.max_queries = 5;
    {
        sm::Portal portal(dir, policy);
        portal.add_principal("v", sm::Role::VERIFIER, "t");
        portal.add_principal("a", sm::Role::AUDITOR, "tok-a");
        asset = portal.register_asset(f.original, f.keys, f.claim, f.config);
        portal.verify_model("v", "t", asset, f.marked);
        portal.verify_model("v", "t", asset, f.marked);
    }

    // A new instance over the same directory adopts the stored policy even
    // when constructed with a different one, and continues budgets, assets,
    // credentials and the audit sequence.
    sm::PortalPolicy other;
    other.max_queries = 99;
    sm::Portal reopened(dir, other);
    EXPECT_EQ(reopened.policy().max_queries, 5u);
    EXPECT_EQ(reopened.budget_remaining("v"), 3u);

    const sm::VerifyResponse r = reopened.verify_model("v", "t", asset, f.marked);
    EXPECT_TRUE(r.payload.at("present").get<bool>());
    EXPECT_EQ(r.audit_sequence, 3u);

    const auto records = reopened.export_audit("a", "tok-a");
    ASSERT_EQ(records.size(), 3u);
    for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(records[i].sequence, i + 1);
}

TEST(Portal, PolicyAndEnumValidation) {
    sm::PortalPolicy bad;
    bad.max_queries = 0;
    EXPECT_THROW(sm::Portal(fresh_dir("bad-policy"), bad), sm::ConfigError);

    EXPECT_THROW(sm::truncation_from_string("PARTIAL"), sm::ConfigError);
    EXPECT_EQ(sm::truncation_from_string("FULL"), sm::Truncation::FULL);
    EXPECT_EQ(sm::truncation_from_string(sm::to_string(sm::Truncation::DECISION_ONLY)),
              sm::Truncation::DECISION_ONLY);
    EXPECT_THROW(sm::role_from_string("ROOT"), sm::ConfigError);
    EXPECT_EQ(sm::role_from_string("AUDITOR"), sm::Role::AUDITOR);

    // Auto-generated credentials are 32 hex characters.
    sm::Portal portal(fresh_dir("token"));
    const std::string token = portal.add_principal("p", sm::Role::VERIFIER);
    EXPECT_EQ(token.size(), 32u);
    EXPECT_EQ(token.find_first_not_of("0123456789abcdef"), std::string::npos);
}
