#pragma once

// HTTP front end for SessionStore.
//
//   POST  /sessions                      {image, model, truth?, study_mode?} -> 201 {id, token}
//   GET   /sessions/{id}                 status
//   GET   /sessions/{id}/image           display raster (inverted in study mode)
//   GET   /sessions/{id}/truth           truth overlay (study mode)
//   POST  /sessions/{id}/segment         {schedule?, wait?} -> 202, or 200 when wait is set
//   PATCH /sessions/{id}/points/{index}  {x, y, t_ms, t_down_ms?, density?}
//   GET   /sessions/{id}/contour?density=N
//   POST  /sessions/{id}/export          {t_ms?}
//   GET   /models, GET /schedules
//
// Writers pass the session token in the X-Session-Token header.

#include <aspl/session.hpp>

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace aspl {

void register_routes(httplib::Server& server, SessionStore& store);

/// Blocks serving on host:port until the server is stopped.
void serve(SessionStore& store, const std::string& host, int port);

} // namespace aspl
