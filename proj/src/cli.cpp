#include "mfeval/cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mfeval/http_api.hpp"
#include "mfeval/report.hpp"
#include "mfeval/semantic.hpp"
#include "mfeval/service.hpp"
#include "mfeval/simulate.hpp"

namespace mfeval::cli {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

protocol::Protocol load_protocol(const std::string& ref) {
    if (ref == "graimes") return protocol::build_graimes_protocol();
    return protocol::parse_protocol(read_file(ref));
}

std::vector<study::Evaluator> load_roster(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }
    if (!doc.is_array()) throw ParseError(path, "expected an array of evaluators");
    std::vector<study::Evaluator> out;
    for (std::size_t i = 0; i < doc.size(); ++i)
        out.push_back(study::evaluator_from_json(doc[i], "[" + std::to_string(i) + "]"));
    return out;
}

struct AnalyticsFlags {
    std::string policy = "item";
    bool no_ties = false;
    std::string provider = "builtin";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--policy", policy, "Missing-data policy")->check(CLI::IsMember({"item", "rater"}));
        cmd->add_flag("--no-ties", no_ties, "Disable the Kendall tie correction");
        cmd->add_option("--provider", provider, "Embedding provider: builtin or an http(s) URL");
    }
};

std::atomic<http::Api*> g_serving{nullptr};

extern "C" void stop_serving(int) {
    if (http::Api* api = g_serving.load()) api->stop();
}

void print_error(std::ostream& err, const json& body) { err << body.dump() << "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Microfiction evaluation studies: protocol, responses, reliability statistics, reports"};
    app.name(args.empty() ? "mfeval" : args[0]);
    app.require_subcommand(1);

    std::string data_dir = "mfeval-data";
    app.add_option("--data-dir", data_dir, "Study storage directory")->envname("MFEVAL_DATA_DIR");

    std::function<void()> action;
    auto svc = [&] { return std::make_unique<service::StudyService>(data_dir); };

    // protocol
    auto* protocol_cmd = app.add_subcommand("protocol", "Protocol files")->require_subcommand(1);
    std::string protocol_file;
    auto* validate = protocol_cmd->add_subcommand("validate", "Check a protocol file");
    validate->add_option("file", protocol_file)->required();
    validate->callback([&] {
        action = [&] {
            const auto p = protocol::parse_protocol(read_file(protocol_file));
            const auto v = protocol::validate_protocol(p);
            if (!v.empty()) {
                std::string first = v.front().message;
                throw ValidationError("invalid_protocol", first, v);
            }
            out << json{{"valid", true}, {"id", p.id}, {"questions", p.questions().size()},
                        {"meta_questions", p.meta_questions.size()}}
                       .dump()
                << "\n";
        };
    });
    auto* canonical = protocol_cmd->add_subcommand("canonical", "Print the built-in protocol");
    canonical->callback([&] { action = [&] { out << protocol::to_json(protocol::build_graimes_protocol()).dump(2) << "\n"; }; });

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "Corpus files")->require_subcommand(1);
    std::string corpus_file;
    auto* ingest = corpus_cmd->add_subcommand("ingest", "Check a corpus file and summarize it");
    ingest->add_option("file", corpus_file)->required();
    ingest->callback([&] {
        action = [&] {
            const auto c = corpus::parse_corpus(read_file(corpus_file));
            json items = json::array();
            for (const auto& mf : c.items())
                items.push_back({{"id", mf.id},
                                 {"blind_label", mf.blind_label},
                                 {"word_count", mf.word_count},
                                 {"conforming", mf.conforming}});
            out << json{{"items", items}}.dump(2) << "\n";
        };
    });

    // study
    auto* study_cmd = app.add_subcommand("study", "Create and manage studies")->require_subcommand(1);
    std::string study_id, study_protocol = "graimes", study_corpus, study_roster;
    bool assign_all = false;
    auto* create = study_cmd->add_subcommand("create", "Create a draft study");
    create->add_option("--id", study_id, "Study id (default study-<n>)");
    create->add_option("--protocol", study_protocol, "\"graimes\" or a protocol file");
    create->add_option("--corpus", study_corpus, "Corpus file")->required();
    create->add_option("--roster", study_roster, "Roster file");
    create->add_flag("--assign-all", assign_all, "Assign every microfiction to every evaluator");
    create->callback([&] {
        action = [&] {
            service::CreateRequest r;
            if (!study_id.empty()) r.id = study_id;
            r.protocol = load_protocol(study_protocol);
            r.corpus = corpus::parse_corpus(read_file(study_corpus)).items();
            if (!study_roster.empty()) r.roster = load_roster(study_roster);
            r.assign_all = assign_all;
            const auto created = svc()->create(std::move(r));
            out << json{{"id", created.id}, {"token", created.token}}.dump() << "\n";
        };
    });
    auto add_transition = [&](const char* name, const char* help, study::Status status) {
        auto* cmd = study_cmd->add_subcommand(name, help);
        cmd->add_option("study", study_id)->required();
        cmd->callback([&, status] {
            action = [&, status] {
                svc()->set_status(study_id, status);
                out << json{{"id", study_id}, {"status", study::status_name(status)}}.dump() << "\n";
            };
        });
    };
    add_transition("open", "Open a study for responses", study::Status::Open);
    add_transition("close", "Close a study and reveal provenance", study::Status::Closed);
    auto* list = study_cmd->add_subcommand("list", "List studies");
    list->callback([&] { action = [&] { out << json(svc()->list()).dump() << "\n"; }; });

    // responses
    auto* responses_cmd = app.add_subcommand("responses", "Response files")->require_subcommand(1);
    std::string responses_file;
    auto* import = responses_cmd->add_subcommand("import", "Submit a responses CSV");
    import->add_option("csv", responses_file)->required();
    import->callback([&] {
        action = [&] {
            auto s = svc();
            json results = json::array();
            for (auto& group : study::parse_responses_csv(read_file(responses_file))) {
                const auto proto = s->snapshot(group.study_id).protocol;
                for (auto& sheet : group.sheets) study::type_answers(proto, sheet);
                service::SubmitResult r;
                if (!group.sheets.empty()) r = s->submit(group.study_id, group.sheets);
                for (auto& m : group.meta) s->submit_meta(group.study_id, m);
                results.push_back({{"study", group.study_id},
                                   {"accepted", r.accepted},
                                   {"replaced", r.replaced},
                                   {"meta", group.meta.size()}});
            }
            out << results.dump() << "\n";
        };
    });
    auto* export_cmd = responses_cmd->add_subcommand("export", "Print a study's responses as CSV");
    export_cmd->add_option("study", study_id)->required();
    export_cmd->callback([&] { action = [&] { out << svc()->export_csv(study_id); }; });

    // stats / report / matrix
    AnalyticsFlags flags;
    auto compute = [&](service::StudyService& s) {
        const auto provider = semantic::make_provider(flags.provider);
        analytics::Options o;
        o.policy = *stats::parse_policy(flags.policy);
        o.tie_correction = !flags.no_ties;
        o.provider = provider.get();
        return s.analytics(study_id, o);
    };

    auto* stats_cmd = app.add_subcommand("stats", "Print the analytics report as JSON");
    stats_cmd->add_option("study", study_id)->required();
    flags.add_to(stats_cmd);
    stats_cmd->callback([&] { action = [&] { out << analytics::to_json(compute(*svc())).dump(2) << "\n"; }; });

    auto* report_cmd = app.add_subcommand("report", "Render a table or chart series");
    std::string table_name, chart_name, format_name = "csv";
    report_cmd->add_option("study", study_id)->required();
    auto* table_opt = report_cmd->add_option("--table", table_name, "av-sd, sd-ordered, icc, alpha, sections, kendall")
                          ->check(CLI::IsMember({"av-sd", "sd-ordered", "icc", "alpha", "sections", "kendall"}));
    auto* chart_opt = report_cmd->add_option("--chart", chart_name, "icc, alpha, sections (JSON series)")
                          ->check(CLI::IsMember({"icc", "alpha", "sections"}));
    table_opt->excludes(chart_opt);
    report_cmd->add_option("--format", format_name, "csv or markdown")->check(CLI::IsMember({"csv", "markdown", "md"}));
    flags.add_to(report_cmd);
    report_cmd->callback([&] {
        if (table_name.empty() && chart_name.empty()) throw CLI::RequiredError("--table or --chart");
        action = [&] {
            const auto r = compute(*svc());
            if (!chart_name.empty())
                out << report::to_json(report::chart_series(r, *report::parse_chart_kind(chart_name))).dump(2) << "\n";
            else
                out << report::render_table(r, *report::parse_table_kind(table_name), *report::parse_format(format_name));
        };
    });

    auto* matrix_cmd = app.add_subcommand("matrix", "Open-answer agreement matrix for one question and microfiction");
    int matrix_question = 0;
    std::string matrix_mf;
    matrix_cmd->add_option("study", study_id)->required();
    matrix_cmd->add_option("--question", matrix_question)->required();
    matrix_cmd->add_option("--mf", matrix_mf, "Microfiction id or blind label")->required();
    matrix_cmd->add_option("--provider", flags.provider, "Embedding provider: builtin or an http(s) URL");
    matrix_cmd->callback([&] {
        action = [&] {
            const auto s = svc()->snapshot(study_id);
            const auto* mf = s.find_mf(matrix_mf);
            if (!mf) throw NotFoundError("no microfiction " + matrix_mf + " in " + study_id);
            std::vector<semantic::JudgeAnswer> answers;
            for (const auto& e : s.roster) {
                auto it = s.sheets.find({e.id, mf->id});
                if (it == s.sheets.end()) continue;
                auto a = it->second.answers.find(matrix_question);
                const std::string* text = a == it->second.answers.end() ? nullptr : std::get_if<std::string>(&a->second);
                answers.push_back({e.display_alias, text ? *text : std::string()});
            }
            const auto provider = semantic::make_provider(flags.provider);
            const auto m = semantic::agreement_matrix(answers, matrix_question, mf->blind_label, *provider);
            out << semantic::to_json(m).dump(2) << "\n";
        };
    });

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    std::string addr = "127.0.0.1:8080";
    serve_cmd->add_option("--addr", addr, "host:port");
    serve_cmd->add_option("--provider", flags.provider, "Embedding provider: builtin or an http(s) URL");
    serve_cmd->callback([&] {
        const auto colon = addr.rfind(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--addr", "expected host:port");
        action = [&, colon] {
            const std::string host = addr.substr(0, colon);
            int port = 0;
            try {
                port = std::stoi(addr.substr(colon + 1));
            } catch (const std::exception&) {
                throw ParseError("--addr", "bad port in " + addr);
            }
            auto s = svc();
            const auto provider = semantic::make_provider(flags.provider);
            http::Api api(*s, provider.get());
            g_serving = &api;
            std::signal(SIGINT, stop_serving);
            std::signal(SIGTERM, stop_serving);
            err << json{{"listening", addr}, {"data_dir", data_dir}}.dump() << "\n";
            const bool ok = api.listen(host, port);
            g_serving = nullptr;
            if (!ok) throw Error("listen_failed", "cannot listen on " + addr);
        };
    });

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Enroll synthetic raters and submit their sheets");
    simulate::Options sim;
    std::string sim_out;
    sim_cmd->add_option("study", study_id)->required();
    sim_cmd->add_option("--raters", sim.raters, "Number of synthetic raters")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--bias-sd", sim.bias_sd, "Per-rater bias SD")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--noise-sd", sim.noise_sd, "Per-answer noise SD")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--quality", sim.quality, "True quality per microfiction, corpus order");
    sim_cmd->add_option("--out", sim_out, "Also write the generated responses CSV here");
    sim_cmd->callback([&] {
        action = [&] {
            auto s = svc();
            const auto before = s->snapshot(study_id);
            auto generated = simulate::generate(before, sim);
            s->add_evaluators(study_id, generated.evaluators);
            std::map<std::string, std::vector<std::string>> assignments;
            for (const auto& e : generated.evaluators)
                for (const auto& mf : before.corpus) assignments[e.id].push_back(mf.id);
            s->set_assignments(study_id, assignments);
            s->submit(study_id, generated.sheets);

            study::Study view = s->snapshot(study_id);
            view.roster.erase(view.roster.begin(), view.roster.begin() + static_cast<long>(before.roster.size()));
            view.meta.clear();
            std::erase_if(view.sheets, [&](const auto& kv) { return !view.find_evaluator(kv.first.first); });
            const std::string text = study::export_csv(view);
            if (!sim_out.empty()) {
                std::ofstream f(sim_out, std::ios::binary | std::ios::trunc);
                if (!(f << text)) throw Error("io_error", "cannot write " + sim_out);
            }
            out << text;
        };
    });

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << "mfeval 1.0.0\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, {{"code", "usage"}, {"message", e.what()}, {"violations", json::array()}});
        return kExitUsage;
    }

    try {
        if (action) action();
        return kExitOk;
    } catch (const Error& e) {
        print_error(err, http::error_body(e));
    } catch (const std::exception& e) {
        print_error(err, {{"code", "internal"}, {"message", e.what()}, {"violations", json::array()}});
    }
    return kExitDomain;
}

}  // namespace mfeval::cli
