#pragma once

// HTTP/JSON front end over StudyService.
//
//   POST /studies                             create (no token needed)
//   POST /studies/{id}/evaluators             {evaluators:[...]}
//   POST /studies/{id}/assignments            {assignments:{evaluator:[mf...]}} or {all:true}
//   POST /studies/{id}/status                 {status:"open"|"closed"}
//   POST /studies/{id}/responses              sheet, {sheets:[...]} or meta answers
//   GET  /studies/{id}/progress
//   GET  /studies/{id}/analytics?policy=item|rater&ties=on|off
//   GET  /studies/{id}/export.csv
//   GET  /studies/{id}/tasks/{evaluator}      blind views + protocol
//
// Study routes require "Authorization: Bearer <token>". Errors are
// {code, message, violations:[{code, subject, message}]}.

#include <memory>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "mfeval/semantic.hpp"
#include "mfeval/service.hpp"

namespace mfeval::http {

class Api {
public:
    // `provider` is used for analytics; the built-in one when null.
    explicit Api(service::StudyService& service, const semantic::Provider* provider = nullptr);

    httplib::Server& server() noexcept { return server_; }

    // Blocking. Returns false when the address cannot be bound.
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it, or -1.
    int bind_any(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready();

private:
    void routes();

    service::StudyService& service_;
    const semantic::Provider* provider_;
    httplib::Server server_;
};

// HTTP status for a domain error code.
int status_for(const std::string& code) noexcept;

nlohmann::json error_body(const Error& e);

}  // namespace mfeval::http
