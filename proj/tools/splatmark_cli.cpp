// Copyright Contributors to the splatmark Project
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface over the splatmark library: scene synthesis, keyset
// management, embed/detect round trips, attacks, rendering, the sweep
// harness, and a disk-backed verification portal. Every command is a thin
// deterministic wrapper over the corresponding header; all randomness flows
// through the keyset or an explicit --seed, and failures print a single
// machine-readable JSON envelope on stderr with a nonzero exit status.

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "splatmark/attacks.hpp"
#include "splatmark/detect.hpp"
#include "splatmark/error.hpp"
#include "splatmark/fsutil.hpp"
#include "splatmark/gs_model.hpp"
#include "splatmark/image.hpp"
#include "splatmark/keying.hpp"
#include "splatmark/metrics.hpp"
#include "splatmark/portal.hpp"
#include "splatmark/render.hpp"
#include "splatmark/sweep.hpp"
#include "splatmark/watermark.hpp"

namespace {

using nlohmann::json;
using namespace splatmark;

/// CLI11 config reader for flat JSON objects mirroring the long flags, e.g.
/// {"scene": "in.ply", "bits": 48, "alpha": 0.01}. Nested objects map to
/// subcommand scopes. Arrays become repeated values.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames()[0];
            if (opt->count() == 1)
                j[name] = opt->results().at(0);
            else if (opt->count() > 1)
                j[name] = opt->results();
            else if (default_also && !opt->get_default_str().empty())
                j[name] = opt->get_default_str();
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

  private:
    static void collect(const json& j, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& items) {
        if (!j.is_object()) throw CLI::FileError("config root must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto deeper = parents;
                deeper.push_back(key);
                collect(value, deeper, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& elem : value) item.inputs.push_back(scalar(elem));
            else
                item.inputs.push_back(scalar(value));
            items.push_back(std::move(item));
        }
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }
};

Band parse_band(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("band must be formatted as lo:hi, e.g. 0.10:0.18");
    Band band;
    try {
        band.lo = std::stod(text.substr(0, colon));
        band.hi = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("band bounds must be numbers: '" + text + "'");
    }
    validate_band(band);
    return band;
}

Vec3 parse_rgb(const std::string& text) {
    Vec3 rgb = Vec3::Zero();
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &rgb[0], &rgb[1], &rgb[2]) != 3)
        throw ConfigError("color must be formatted as r,g,b in [0,1]");
    return rgb;
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file_text(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_json_out(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_file_atomic(out_path, text);
}

Camera camera_for_scene(const GaussianScene& scene, const std::string& camera_path) {
    if (!camera_path.empty()) return camera_from_json(read_json_file(camera_path));
    const auto ring = default_cameras(scene, 1, 256, 256);
    return ring.at(0);
}

EmbedConfig embed_config_from_flags(std::size_t bits, double alpha, const std::string& protocol,
                                    const std::string& band) {
    EmbedConfig cfg;
    cfg.bit_count = bits;
    cfg.alpha = alpha;
    cfg.protocol = protocol_from_string(protocol);
    if (!band.empty()) cfg.band = parse_band(band);
    validate_embed_config(cfg);
    return cfg;
}

// --- subcommand bodies --------------------------------------------------------------

struct SynthArgs {
    std::size_t gaussians = 4096;
    int degree = 3;
    double extent = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

void cmd_synth(const SynthArgs& a) {
    const GaussianScene scene = synth_scene(a.seed, a.gaussians, a.degree, a.extent);
    save_ply_file(scene, a.out);
}

struct KeygenArgs {
    std::string out;
    std::uint64_t seed = 0;
    bool seeded = false;
};

void cmd_keygen(const KeygenArgs& a) {
    const KeySet keys = a.seeded ? generate_keyset(a.seed) : generate_keyset();
    save_keyset(keys, a.out);
}

struct EmbedArgs {
    std::string scene, keys, claim, band, out, record;
    std::size_t bits = 32;
    double alpha = 0.01;
    std::string protocol = "FIXED_PER_BIT";
};

void cmd_embed(const EmbedArgs& a) {
    const GaussianScene scene = load_ply_file(a.scene);
    const KeySet keys = load_keyset(a.keys);
    const EmbedConfig cfg = embed_config_from_flags(a.bits, a.alpha, a.protocol, a.band);
    const auto [marked, record] = embed(scene, keys, Claim(a.claim), cfg);
    save_ply_file(marked, a.out);
    if (!a.record.empty())
        write_file_atomic(a.record, embed_record_to_json(record).dump(2) + "\n");
}

struct DetectArgs {
    std::string scene, suspect, keys, record, out;
    double rho = 1.0;
    bool do_realign = false;
};

void cmd_detect(const DetectArgs& a) {
    const GaussianScene original = load_ply_file(a.scene);
    GaussianScene suspect = load_ply_file(a.suspect);
    const KeySet keys = load_keyset(a.keys);
    const EmbedRecord record = embed_record_from_json(read_json_file(a.record));
    bool realigned = false;
    if (a.do_realign &&
        (suspect.size() != original.size() || suspect.sh_degree != original.sh_degree)) {
        suspect = realign(original, suspect);
        realigned = true;
    }
    DetectOptions opts;
    opts.rho = a.rho;
    const DetectionResult result = detect_model(original, suspect, keys, record, opts);
    json j = detection_to_json(result);
    j["realigned"] = realigned;
    write_json_out(j, a.out);
}

struct AttackArgs {
    std::string scene, image, kind, out;
    double param = 0.0;
    std::uint64_t seed = 0;
};

void cmd_attack(const AttackArgs& a) {
    if (a.scene.empty() == a.image.empty())
        throw ConfigError("attack needs exactly one of --scene (model attack) or --image "
                          "(image attack)");
    if (!a.scene.empty()) {
        ModelAttackSpec spec;
        spec.kind = model_attack_kind_from_string(a.kind);
        spec.param = a.param;
        spec.seed = a.seed;
        save_ply_file(attack_model(load_ply_file(a.scene), spec), a.out);
    } else {
        ImageAttackSpec spec;
        spec.kind = image_attack_kind_from_string(a.kind);
        spec.param = a.param;
        spec.seed = a.seed;
        save_ppm(attack_image(load_ppm(a.image), spec), a.out);
    }
}

struct RenderArgs {
    std::string scene, camera, background = "0,0,0", out;
};

void cmd_render(const RenderArgs& a) {
    const GaussianScene scene = load_ply_file(a.scene);
    const Camera cam = camera_for_scene(scene, a.camera);
    save_ppm(render(scene, cam, parse_rgb(a.background)), a.out);
}

struct SweepArgs {
    std::string manifest, keys, out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void cmd_sweep(const SweepArgs& a) {
    SweepManifest manifest = parse_sweep_manifest(read_json_file(a.manifest));
    if (!a.out.empty()) manifest.output_dir = a.out;
    if (a.seed_set) manifest.seed = a.seed;
    const KeySet keys = load_keyset(a.keys);
    const SweepResult result = run_sweep(manifest, keys);
    json files = json::array();
    for (const auto& f : result.written_files) files.push_back(f);
    write_json_out(json{{"schema", "splatmark/sweep-run/v1"}, {"written", files}}, "-");
}

struct PortalCommon {
    std::string state;
    std::size_t budget = PortalPolicy{}.max_queries;
    std::string truncation = to_string(PortalPolicy{}.truncation);
    std::size_t views = PortalPolicy{}.challenge_view_count;
};

PortalPolicy portal_policy(const PortalCommon& c) {
    PortalPolicy policy;
    policy.max_queries = c.budget;
    policy.truncation = truncation_from_string(c.truncation);
    policy.challenge_view_count = c.views;
    return policy;
}

void cmd_portal_principal(const PortalCommon& c, const std::string& id, const std::string& role,
                          const std::string& token) {
    Portal portal(c.state, portal_policy(c));
    const std::string issued = portal.add_principal(id, role_from_string(role), token);
    write_json_out(json{{"principal", id}, {"token", issued}}, "-");
}

void cmd_portal_register(const PortalCommon& c, const std::string& scene_path,
                         const std::string& keys_path, const std::string& claim,
                         const std::string& record_path) {
    Portal portal(c.state, portal_policy(c));
    const GaussianScene scene = load_ply_file(scene_path);
    const KeySet keys = load_keyset(keys_path);
    const EmbedRecord record = embed_record_from_json(read_json_file(record_path));
    if (!claim.empty() && claim != record.claim)
        throw ConfigError("--claim disagrees with the embed record claim");
    const std::string id =
        portal.register_asset(scene, keys, Claim(record.claim), embed_config_from_record(record));
    write_json_out(json{{"asset", id}}, "-");
}

void cmd_portal_verify(const PortalCommon& c, const std::string& principal,
                       const std::string& token, const std::string& asset,
                       const std::string& suspect_path, const std::string& out) {
    Portal portal(c.state, portal_policy(c));
    const VerifyResponse response =
        portal.verify_model(principal, token, asset, load_ply_file(suspect_path));
    json j = response.payload;
    j["realigned"] = response.realigned;
    j["audit_sequence"] = response.audit_sequence;
    write_json_out(j, out);
}

void cmd_portal_challenge(const PortalCommon& c, const std::string& asset,
                          const std::string& nonce, const std::string& out) {
    Portal portal(c.state, portal_policy(c));
    json cams = json::array();
    for (const Camera& cam : portal.challenge_viewpoints(asset, nonce))
        cams.push_back(camera_to_json(cam));
    write_json_out(json{{"schema", "splatmark/challenge/v1"}, {"nonce", nonce},
                        {"cameras", cams}},
                   out);
}

void cmd_portal_audit(const PortalCommon& c, const std::string& principal,
                      const std::string& token, const std::string& out) {
    Portal portal(c.state, portal_policy(c));
    json records = json::array();
    for (const AuditRecord& r : portal.export_audit(principal, token))
        records.push_back(audit_record_to_json(r));
    write_json_out(json{{"schema", "splatmark/audit-export/v1"}, {"records", records}}, out);
}

void attach_json_config(CLI::App* cmd) {
    cmd->config_formatter(std::make_shared<JsonConfig>());
    cmd->set_config("--config", "", "JSON file whose keys mirror the long flags");
}

/// CLI11 only processes a config option on the app it parses at the top
/// level, so a `--config` handed to a subcommand would be inert. Expand it
/// before parsing instead: every config key whose long flag is absent from
/// the command line is inserted as `--key value` right after the `--config`
/// pair, which keeps explicit flags authoritative and stays inside the
/// active subcommand's scope.
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t insert_at = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            insert_at = i + 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(std::string("--config=").size());
            insert_at = i + 1;
        } else {
            continue;
        }

        const json config = read_json_file(path);
        if (!config.is_object()) throw ParseError(path + ": config root must be a JSON object");

        std::set<std::string> given;
        for (const std::string& arg : args)
            if (arg.rfind("--", 0) == 0) given.insert(arg.substr(0, arg.find('=')));

        std::vector<std::string> extra;
        for (const auto& [key, value] : config.items()) {
            const std::string flag = "--" + key;
            if (key == "config" || given.count(flag) > 0) continue;
            if (value.is_object())
                throw ParseError(path + ": config keys must mirror flat long flags");
            if (value.is_boolean()) {
                if (value.get<bool>()) extra.push_back(flag);
                continue;
            }
            const auto push_value = [&](const json& v) {
                extra.push_back(flag);
                extra.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            };
            if (value.is_array())
                for (const auto& elem : value) push_value(elem);
            else
                push_value(value);
        }
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(),
                    extra.end());
        i = insert_at + extra.size() - 1;
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Keyed spread-spectrum watermarking for 3D Gaussian splatting assets"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene as binary PLY");
    synth->add_option("--gaussians", synth_args.gaussians, "Number of gaussians")
        ->capture_default_str();
    synth->add_option("--degree", synth_args.degree, "SH degree 0..3")->capture_default_str();
    synth->add_option("--extent", synth_args.extent, "Half-extent of the center cube")
        ->capture_default_str();
    synth->add_option("--seed", synth_args.seed, "Deterministic scene seed")
        ->capture_default_str();
    synth->add_option("--out", synth_args.out, "Output PLY path")->required();
    attach_json_config(synth);
    synth->callback([&] { cmd_synth(synth_args); });

    KeygenArgs keygen_args;
    CLI::App* keygen = app.add_subcommand("keygen", "Generate a keyset JSON file");
    keygen->add_option("--out", keygen_args.out, "Output keyset path")->required();
    keygen->add_option("--seed", keygen_args.seed,
                       "Derive the keyset from this seed (reproducible; for tests)")
        ->each([&](const std::string&) { keygen_args.seeded = true; });
    attach_json_config(keygen);
    keygen->callback([&] { cmd_keygen(keygen_args); });

    EmbedArgs embed_args;
    CLI::App* embed_cmd = app.add_subcommand("embed", "Embed a keyed watermark into a scene");
    embed_cmd->add_option("--scene", embed_args.scene, "Input PLY")->required();
    embed_cmd->add_option("--keys", embed_args.keys, "Keyset JSON")->required();
    embed_cmd->add_option("--claim", embed_args.claim, "Ownership claim string")->required();
    embed_cmd->add_option("--bits", embed_args.bits, "Payload length B")->capture_default_str();
    embed_cmd->add_option("--alpha", embed_args.alpha, "Embedding amplitude")
        ->capture_default_str();
    embed_cmd->add_option("--protocol", embed_args.protocol,
                          "FIXED_PER_BIT or FIXED_TOTAL")
        ->capture_default_str();
    embed_cmd->add_option("--band", embed_args.band, "Carrier band lo:hi (default 0.10:0.18)");
    embed_cmd->add_option("--out", embed_args.out, "Watermarked PLY path")->required();
    embed_cmd->add_option("--record", embed_args.record, "Embed record JSON path");
    attach_json_config(embed_cmd);
    embed_cmd->callback([&] { cmd_embed(embed_args); });

    DetectArgs detect_args;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Run informed detection on a suspect");
    detect_cmd->add_option("--scene", detect_args.scene, "Original (unwatermarked) PLY")
        ->required();
    detect_cmd->add_option("--suspect", detect_args.suspect, "Suspect PLY")->required();
    detect_cmd->add_option("--keys", detect_args.keys, "Keyset JSON")->required();
    detect_cmd->add_option("--record", detect_args.record, "Embed record JSON")->required();
    detect_cmd->add_option("--budget", detect_args.rho,
                           "Detector budget rho in (0,1]: fraction of carriers read")
        ->capture_default_str();
    detect_cmd->add_flag("--realign", detect_args.do_realign,
                         "Realign the suspect to the original before detection");
    detect_cmd->add_option("--out", detect_args.out, "Detection JSON path (default stdout)");
    attach_json_config(detect_cmd);
    detect_cmd->callback([&] { cmd_detect(detect_args); });

    AttackArgs attack_args;
    CLI::App* attack_cmd = app.add_subcommand("attack", "Apply a model or image attack");
    attack_cmd->add_option("--scene", attack_args.scene, "Input PLY (model attack)");
    attack_cmd->add_option("--image", attack_args.image, "Input PPM (image attack)");
    attack_cmd->add_option("--kind", attack_args.kind,
                           "GAUSS_NOISE|DROPOUT|CROP3D|CLONE|TRANSLATE or "
                           "GAUSS_NOISE|BLUR|CROP2D|RESIZE|BRIGHTNESS|JPEG_LIKE|ROTATE")
        ->required();
    attack_cmd->add_option("--param", attack_args.param, "Attack strength parameter")
        ->required();
    attack_cmd->add_option("--seed", attack_args.seed, "Attack randomness seed")
        ->capture_default_str();
    attack_cmd->add_option("--out", attack_args.out, "Output path")->required();
    attach_json_config(attack_cmd);
    attack_cmd->callback([&] { cmd_attack(attack_args); });

    RenderArgs render_args;
    CLI::App* render_cmd = app.add_subcommand("render", "Render a scene to PPM");
    render_cmd->add_option("--scene", render_args.scene, "Input PLY")->required();
    render_cmd->add_option("--camera", render_args.camera,
                           "Camera JSON (default: ring camera derived from the scene)");
    render_cmd->add_option("--background", render_args.background, "Background r,g,b")
        ->capture_default_str();
    render_cmd->add_option("--out", render_args.out, "Output PPM path")->required();
    attach_json_config(render_cmd);
    render_cmd->callback([&] { cmd_render(render_args); });

    SweepArgs sweep_args;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run the fidelity/robustness sweep from a manifest");
    sweep_cmd->add_option("--manifest", sweep_args.manifest, "Sweep manifest JSON")->required();
    sweep_cmd->add_option("--keys", sweep_args.keys, "Keyset JSON")->required();
    sweep_cmd->add_option("--out", sweep_args.out, "Output directory (overrides manifest)");
    sweep_cmd->add_option("--seed", sweep_args.seed, "Seed override for synthetic scenes")
        ->each([&](const std::string&) { sweep_args.seed_set = true; });
    attach_json_config(sweep_cmd);
    sweep_cmd->callback([&] { cmd_sweep(sweep_args); });

    PortalCommon portal_common;
    CLI::App* portal_cmd = app.add_subcommand("portal", "Query-limited verification portal");
    portal_cmd->require_subcommand(1);
    portal_cmd->add_option("--state", portal_common.state, "Portal state directory")->required();
    portal_cmd->add_option("--budget", portal_common.budget, "Per-principal query budget")
        ->capture_default_str();
    portal_cmd->add_option("--truncation", portal_common.truncation,
                           "FULL|DECISION_ONLY|DECISION_PLUS_ACCURACY")
        ->capture_default_str();
    portal_cmd->add_option("--views", portal_common.views, "Challenge viewpoint count")
        ->capture_default_str();

    std::string p_id, p_role = "VERIFIER", p_token;
    CLI::App* principal = portal_cmd->add_subcommand("principal", "Register a principal");
    principal->add_option("--id", p_id, "Principal id")->required();
    principal->add_option("--role", p_role, "VERIFIER or AUDITOR")->capture_default_str();
    principal->add_option("--token", p_token, "Credential (random when omitted)");
    principal->callback([&] { cmd_portal_principal(portal_common, p_id, p_role, p_token); });

    std::string r_scene, r_keys, r_claim, r_record;
    CLI::App* reg = portal_cmd->add_subcommand("register", "Register a watermarked asset");
    reg->add_option("--scene", r_scene, "Original (unwatermarked) PLY")->required();
    reg->add_option("--keys", r_keys, "Keyset JSON")->required();
    reg->add_option("--claim", r_claim, "Claim cross-check (optional)");
    reg->add_option("--record", r_record, "Embed record JSON")->required();
    reg->callback([&] { cmd_portal_register(portal_common, r_scene, r_keys, r_claim, r_record); });

    std::string v_principal, v_token, v_asset, v_suspect, v_out;
    CLI::App* verify = portal_cmd->add_subcommand("verify", "Spend one query verifying a suspect");
    verify->add_option("--principal", v_principal, "Principal id")->required();
    verify->add_option("--token", v_token, "Credential")->required();
    verify->add_option("--asset", v_asset, "Asset id")->required();
    verify->add_option("--suspect", v_suspect, "Suspect PLY")->required();
    verify->add_option("--out", v_out, "Response JSON path (default stdout)");
    verify->callback(
        [&] { cmd_portal_verify(portal_common, v_principal, v_token, v_asset, v_suspect, v_out); });

    std::string c_asset, c_nonce, c_out;
    CLI::App* challenge =
        portal_cmd->add_subcommand("challenge", "Derive keyed challenge viewpoints");
    challenge->add_option("--asset", c_asset, "Asset id")->required();
    challenge->add_option("--nonce", c_nonce, "Challenge nonce")->required();
    challenge->add_option("--out", c_out, "Camera list JSON path (default stdout)");
    challenge->callback([&] { cmd_portal_challenge(portal_common, c_asset, c_nonce, c_out); });

    std::string a_principal, a_token, a_out;
    CLI::App* audit = portal_cmd->add_subcommand("audit", "Export the audit log (AUDITOR role)");
    audit->add_option("--principal", a_principal, "Principal id")->required();
    audit->add_option("--token", a_token, "Credential")->required();
    audit->add_option("--out", a_out, "Audit JSON path (default stdout)");
    audit->callback([&] { cmd_portal_audit(portal_common, a_principal, a_token, a_out); });

    try {
        if (argc > 0) app.name(argv[0]);
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config_args(args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}
