#pragma once

// JSON-over-HTTP surface for presets, stateless renders and edit sessions.

#include "bwtex/json.hpp"
#include "bwtex/png.hpp"
#include "bwtex/presets.hpp"
#include "bwtex/session.hpp"

#include <httplib.h>

#include <string>

namespace bwtex {

inline constexpr double kDefaultPngScale = 4.0;

inline int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::SessionNotFound: return 404;
    case ErrorCode::RenderFailure:
    case ErrorCode::IoError: return 500;
    default: return 400;
    }
}

inline Json error_body(std::string_view code, std::string_view message) {
    return Json{{"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
}

namespace service_detail {

inline void send_json(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// Runs `fn`, turning library errors into JSON error responses. Body parse
/// failures report `parse_code`.
template <typename F>
void guarded(httplib::Response& res, F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        send_json(res, error_body(to_string(e.code()), e.what()), http_status(e.code()));
    } catch (const std::exception& e) {
        send_json(res, error_body("INTERNAL", e.what()), 500);
    }
}

inline Json body_json(const httplib::Request& req, ErrorCode on_error) {
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        fail(on_error, std::string("malformed JSON body: ") + e.what());
    }
}

inline Json session_payload(const EditSession& s) {
    return Json{{"session_id", s.id()}, {"svg", s.svg()}, {"summary", s.summary()}};
}

inline Json presets_listing(const PresetLibrary& lib) {
    Json sets = Json::array(), winners = Json::array();
    for (const auto& s : lib.sets) sets.push_back(PresetLibrary::preset_to_json(s));
    for (const auto& w : lib.winners) winners.push_back({{"id", w.id}, {"chart", to_json(w.chart)}});
    return Json{{"sets", std::move(sets)},
                {"winners", std::move(winners)},
                {"default_dataset", to_json(lib.default_dataset)}};
}

} // namespace service_detail

/// Registers every route on `server`. `store` and `lib` must outlive it.
inline void install_routes(httplib::Server& server, SessionStore& store,
                           const PresetLibrary& lib = PresetLibrary::builtin()) {
    using namespace service_detail;

    server.Get("/api/presets", [&lib](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { send_json(res, presets_listing(lib)); });
    });

    server.Post("/api/render", [&lib](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const Json body = body_json(req, ErrorCode::ParseError);
            json_detail::require_object(body, "render");
            json_detail::reject_unknown(body, {"chart", "data", "selected"}, "render");
            RenderOptions opts;
            opts.glyphs = &lib.glyphs;
            if (body.contains("selected") && !body["selected"].is_null())
                opts.selected = json_detail::string(body, "selected", "render");
            const auto chart = chart_from_json(json_detail::required(body, "chart", "render"));
            const auto data = body.contains("data") ? dataset_from_json(body["data"]) : lib.default_dataset;
            res.set_content(render_chart(chart, data, opts), "image/svg+xml");
        });
    });

    server.Post("/api/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const Json body = body_json(req, ErrorCode::InvalidAction);
            if (!body.is_object() || !body.contains("preset") || !body["preset"].is_string())
                fail(ErrorCode::InvalidAction, "body needs a string 'preset'");
            std::optional<ChartKind> kind;
            if (body.contains("chart")) {
                if (!body["chart"].is_string()) fail(ErrorCode::InvalidAction, "'chart' must be a string");
                try {
                    kind = parse_chart_kind(body["chart"].get<std::string>());
                } catch (const Error& e) {
                    fail(ErrorCode::InvalidAction, e.what());
                }
            }
            const auto id = store.create(body["preset"].get<std::string>(), kind);
            store.with(id, [&](EditSession& s) {
                send_json(res, session_payload(s), 201);
                return 0;
            });
        });
    });

    server.Delete("/api/sessions/:id", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto& id = req.path_params.at("id");
            if (!store.erase(id)) fail(ErrorCode::SessionNotFound, "no session '" + id + "'");
            res.status = 204;
        });
    });

    server.Get("/api/sessions/:id", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            store.with(req.path_params.at("id"), [&](EditSession& s) {
                send_json(res, session_payload(s));
                return 0;
            });
        });
    });

    server.Post("/api/sessions/:id/actions", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto action = action_from_json(body_json(req, ErrorCode::InvalidAction));
            store.with(req.path_params.at("id"), [&](EditSession& s) {
                s.apply(action);
                send_json(res, session_payload(s));
                return 0;
            });
        });
    });

    for (const char* verb : {"undo", "redo"}) {
        const bool undo = std::string_view(verb) == "undo";
        server.Post(std::string("/api/sessions/:id/") + verb,
                    [&store, undo](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            store.with(req.path_params.at("id"), [&](EditSession& s) {
                                undo ? s.undo() : s.redo();
                                send_json(res, session_payload(s));
                                return 0;
                            });
                        });
                    });
    }

    server.Get("/api/sessions/:id/export", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string format = req.has_param("format") ? req.get_param_value("format") : "svg";
            if (format != "svg" && format != "png" && format != "json")
                fail(ErrorCode::InvalidAction, "format must be svg, png or json");
            double scale = kDefaultPngScale;
            if (req.has_param("scale")) {
                try {
                    scale = std::stod(req.get_param_value("scale"));
                } catch (const std::exception&) {
                    fail(ErrorCode::InvalidAction, "scale must be a number");
                }
                if (!(scale > 0.0 && scale <= 16.0)) fail(ErrorCode::InvalidAction, "scale must lie in (0, 16]");
            }
            store.with(req.path_params.at("id"), [&](EditSession& s) {
                if (format == "svg") {
                    res.set_content(s.svg(), "image/svg+xml");
                } else if (format == "json") {
                    send_json(res, s.export_json());
                } else {
                    const auto png = encode_png(rasterize_scene(s.scene(), scale));
                    res.set_content(std::string(png.begin(), png.end()), "image/png");
                }
                return 0;
            });
        });
    });
}

} // namespace bwtex
