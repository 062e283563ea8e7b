#include "mfeval/http_api.hpp"

#include <functional>

#include "json_fields.hpp"
#include "mfeval/corpus.hpp"
#include "mfeval/protocol.hpp"

namespace mfeval::http {

using nlohmann::json;

namespace {

class Unauthorized : public Error {
public:
    Unauthorized() : Error("unauthorized", "missing or invalid bearer token") {}
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, status_for(e.code()), error_body(e)); }

// Runs `fn`, mapping thrown errors onto error responses.
void guard(httplib::Response& res, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_error(res, e);
    } catch (const std::exception& e) {
        send_json(res, 500, {{"code", "internal"}, {"message", e.what()}, {"violations", json::array()}});
    }
}

std::string bearer(const httplib::Request& req) {
    const std::string h = req.get_header_value("Authorization");
    static constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return {};
    return h.substr(prefix.size());
}

protocol::Protocol protocol_field(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "graimes") return protocol::build_graimes_protocol();
        throw ParseError(path, "the only named protocol is \"graimes\"");
    }
    return protocol::protocol_from_json(j);
}

stats::MissingPolicy policy_param(const httplib::Request& req) {
    if (!req.has_param("policy")) return stats::MissingPolicy::ListwiseByItem;
    auto p = stats::parse_policy(req.get_param_value("policy"));
    if (!p) throw ParseError("policy", "expected item or rater");
    return *p;
}

bool ties_param(const httplib::Request& req) {
    if (!req.has_param("ties")) return true;
    const std::string v = req.get_param_value("ties");
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ParseError("ties", "expected on or off");
}

}  // namespace

int status_for(const std::string& code) noexcept {
    if (code == "parse_error") return 400;
    if (code == "unauthorized") return 401;
    if (code == "not_found") return 404;
    if (code == "conflict") return 409;
    if (code == "transport_error") return 502;
    if (code == "journal_error") return 500;
    return 422;
}

json error_body(const Error& e) {
    json violations = json::array();
    for (const auto& v : e.violations())
        violations.push_back({{"code", v.code}, {"subject", v.subject}, {"message", v.message}});
    return {{"code", e.code()}, {"message", e.what()}, {"violations", violations}};
}

Api::Api(service::StudyService& service, const semantic::Provider* provider)
    : service_(service), provider_(provider) {
    routes();
}

void Api::routes() {
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    auto authed = [this](const std::string& pattern, bool post,
                         std::function<void(const httplib::Request&, httplib::Response&, const std::string&)> fn) {
        auto handler = [this, fn](const httplib::Request& req, httplib::Response& res) {
            guard(res, [&] {
                const std::string id = req.matches[1];
                if (!service_.check_token(id, bearer(req))) throw Unauthorized();
                fn(req, res, id);
            });
        };
        if (post)
            server_.Post(pattern, handler);
        else
            server_.Get(pattern, handler);
    };

    server_.Post("/studies", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            const json body = detail::parse_document(req.body);
            detail::Fields f(body, "");
            service::CreateRequest cr;
            if (const json* id = f.optional("id")) {
                if (!id->is_string()) throw ParseError("id", "expected a string");
                cr.id = id->get<std::string>();
            }
            cr.protocol = protocol_field(f.required("protocol"), f.path("protocol"));
            cr.corpus = corpus::corpus_from_json(f.required("corpus")).items();
            if (const json* roster = f.optional("roster")) {
                if (!roster->is_array()) throw ParseError("roster", "expected an array");
                for (std::size_t i = 0; i < roster->size(); ++i)
                    cr.roster.push_back(study::evaluator_from_json((*roster)[i], detail::index_path("roster", i)));
            }
            cr.assign_all = f.boolean_or("assign_all", false);
            f.finish();
            const auto created = service_.create(std::move(cr));
            send_json(res, 201, {{"id", created.id}, {"token", created.token}, {"status", "draft"}});
        });
    });

    authed(R"(/studies/([A-Za-z0-9._-]+)/evaluators)", true,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               const json body = detail::parse_document(req.body);
               detail::Fields f(body, "");
               const json& list = f.array("evaluators");
               f.finish();
               std::vector<study::Evaluator> added;
               for (std::size_t i = 0; i < list.size(); ++i)
                   added.push_back(study::evaluator_from_json(list[i], detail::index_path("evaluators", i)));
               service_.add_evaluators(id, added);
               json roster = json::array();
               for (const auto& e : service_.snapshot(id).roster) roster.push_back(study::to_json(e));
               send_json(res, 200, {{"roster", roster}});
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/assignments)", true,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               const json body = detail::parse_document(req.body);
               detail::Fields f(body, "");
               if (f.boolean_or("all", false)) {
                   f.finish();
                   service_.assign_all(id);
               } else {
                   const json& a = f.required("assignments");
                   f.finish();
                   std::map<std::string, std::vector<std::string>> m;
                   try {
                       m = a.get<std::map<std::string, std::vector<std::string>>>();
                   } catch (const json::exception&) {
                       throw ParseError("assignments", "expected an object of string arrays");
                   }
                   service_.set_assignments(id, m);
               }
               const auto s = service_.snapshot(id);
               json out = json::object();
               for (const auto& [e, mfs] : s.assignments) {
                   json labels = json::array();
                   for (const auto& mf : mfs) labels.push_back(s.find_mf(mf)->blind_label);
                   out[e] = labels;
               }
               send_json(res, 200, {{"assignments", out}});
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/status)", true,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               const json body = detail::parse_document(req.body);
               detail::Fields f(body, "");
               const std::string name = f.string("status");
               f.finish();
               auto st = study::parse_status(name);
               if (!st) throw ParseError("status", "expected open or closed");
               service_.set_status(id, *st);
               send_json(res, 200, {{"status", study::status_name(*st)}});
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/responses)", true,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               const json body = detail::parse_document(req.body);
               if (body.is_object() && body.contains("meta_answers")) {
                   service_.submit_meta(id, study::meta_from_json(body));
                   send_json(res, 200, {{"accepted", 1}, {"kind", "meta"}});
                   return;
               }
               std::vector<study::ResponseSheet> sheets;
               if (body.is_object() && body.contains("sheets")) {
                   detail::Fields f(body, "");
                   const json& list = f.array("sheets");
                   f.finish();
                   for (std::size_t i = 0; i < list.size(); ++i) {
                       try {
                           sheets.push_back(study::sheet_from_json(list[i]));
                       } catch (const ParseError& e) {
                           throw ParseError(detail::join_path(detail::index_path("sheets", i), e.locus()),
                                            e.message());
                       }
                   }
               } else {
                   sheets.push_back(study::sheet_from_json(body));
               }
               const auto r = service_.submit(id, std::move(sheets));
               send_json(res, 200,
                         {{"accepted", r.accepted}, {"replaced", r.replaced}, {"microfictions", r.blind_labels}});
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/progress)", false,
           [this](const httplib::Request&, httplib::Response& res, const std::string& id) {
               send_json(res, 200, service_.progress(id));
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/analytics)", false,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               analytics::Options o;
               o.policy = policy_param(req);
               o.tie_correction = ties_param(req);
               o.provider = provider_;
               send_json(res, 200, analytics::to_json(service_.analytics(id, o)));
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/export\.csv)", false,
           [this](const httplib::Request&, httplib::Response& res, const std::string& id) {
               res.status = 200;
               res.set_content(service_.export_csv(id), "text/csv; charset=utf-8");
           });

    authed(R"(/studies/([A-Za-z0-9._-]+)/tasks/([^/]+))", false,
           [this](const httplib::Request& req, httplib::Response& res, const std::string& id) {
               send_json(res, 200, service_.tasks(id, req.matches[2]));
           });
}

bool Api::listen(const std::string& host, int port) { return server_.listen(host, port); }

int Api::bind_any(const std::string& host) { return server_.bind_to_any_port(host); }

bool Api::listen_after_bind() { return server_.listen_after_bind(); }

void Api::stop() { server_.stop(); }

void Api::wait_until_ready() { server_.wait_until_ready(); }

}  // namespace mfeval::http
