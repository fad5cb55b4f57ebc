#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include <httplib.h>

#include "srfid/common/error.hpp"
#include "srfid/service/config.hpp"
#include "srfid/service/scheduler.hpp"
#include "srfid/service/server.hpp"
#include "study_fixture.hpp"
#include "tempdir.hpp"

using namespace srfid;
using namespace srfid::service;
using srfid::testing::TempDir;

namespace {

const char* kToken = "s3cret";

ServiceConfig make_config(const TempDir& dir, double trap_rate = kDefaultTrapRate) {
  ServiceConfig c;
  c.port = 0;
  c.data_dir = dir / "data";
  c.images_dir = dir / "images";
  c.admin_token = kToken;
  c.trap_rate = trap_rate;
  c.seed = 7;
  return c;
}

// Server on an ephemeral port, served from a background thread.
struct Running {
  explicit Running(ServiceConfig c) : server(std::move(c)) {
    port = server.bind();
    thread = std::thread([this] { server.run(); });
    while (!server.running()) std::this_thread::yield();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(5, 0);
    return c;
  }
  AnnotationServer server;
  int port = 0;
  std::thread thread;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expect) {
  auto res = c.Post(path, body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == expect);
  return Json::parse(res->body);
}

Json get(httplib::Client& c, const std::string& path, int expect) {
  auto res = c.Get(path);
  REQUIRE(res);
  CHECK(res->status == expect);
  return Json::parse(res->body);
}

std::string open_session(httplib::Client& c, const std::string& name) {
  return post(c, "/api/session", Json{{"annotator_name", name}}, 200)["session_id"].get<std::string>();
}

Json answer(httplib::Client& c, const std::string& sid, const std::string& pair_id, const char* ans, int expect) {
  return post(c, "/api/session/" + sid + "/answer", Json{{"pair_id", pair_id}, {"answer", ans}, {"latency_ms", 900}},
              expect);
}

bool mentions_trap(const std::string& body) {
  return body.find("is_trap") != std::string::npos || body.find("trap_expected") != std::string::npos;
}

}  // namespace

TEST_CASE("config: bind address, relative paths and validation") {
  TempDir dir;
  {
    std::ofstream(dir / "cfg.json") << R"({"bind_address": "0.0.0.0:9123", "data_dir": "d",
      "admin_token": "x", "trap_rate": 0.1, "images_dir": "/abs/img", "seed": 5})";
  }
  const auto c = load_service_config(dir / "cfg.json");
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9123);
  CHECK(c.data_dir == dir.path() / "d");
  CHECK(c.images_dir == std::filesystem::path("/abs/img"));
  CHECK(c.trap_rate == doctest::Approx(0.1));
  CHECK(c.seed == 5);

  std::string host = "h";
  int port = 1;
  parse_bind_address(":0", host, port);
  CHECK(host == "h");
  CHECK(port == 0);
  CHECK_THROWS_AS(parse_bind_address("host:abc", host, port), ArgumentError);
  CHECK_THROWS_AS(config_from_json(Json{{"admin_token", "x"}}, dir.path()), ArgumentError);
  CHECK_THROWS_AS(config_from_json(Json{{"data_dir", "d"}, {"trap_rate", 2.0}}, dir.path()), ArgumentError);
  CHECK_THROWS_AS(config_from_json(Json{{"data_dir", 3}}, dir.path()), ArgumentError);
  CHECK_THROWS_AS(load_service_config(dir / "missing.json"), IoError);
}

TEST_CASE("scheduler: deterministic, excludes answered, traps one per block") {
  const auto pairs = srfid::testing::synthetic_pairs(45, 5);
  const auto q1 = build_queue(pairs, {}, {}, 1.0 / 15.0, 11);
  const auto q2 = build_queue(pairs, {}, {}, 1.0 / 15.0, 11);
  const auto q3 = build_queue(pairs, {}, {}, 1.0 / 15.0, 12);
  CHECK(q1 == q2);
  CHECK(q1 != q3);
  REQUIRE(q1.size() == 48);  // 45 regular + ceil(45/15) traps

  // Exactly one trap among each run of 15 regular pairs.
  std::set<std::string> seen(q1.begin(), q1.end());
  CHECK(seen.size() == q1.size());
  // A block's trap may sit right after its 15th regular pair.
  std::size_t block_start = 0;
  for (int b = 0; b < 3; ++b) {
    int regular = 0, traps = 0;
    std::size_t i = block_start;
    while (i < q1.size() && (regular < 15 || (traps == 0 && q1[i][0] == 't'))) {
      (q1[i][0] == 't' ? traps : regular)++;
      ++i;
    }
    CHECK(regular == 15);
    CHECK(traps == 1);
    block_start = i;
  }

  std::unordered_set<std::string> answered{"p000", "p001", "t000"};
  const auto q4 = build_queue(pairs, answered, {}, 1.0 / 15.0, 11);
  for (const auto& id : q4) CHECK(answered.count(id) == 0);
  CHECK(build_queue(pairs, {}, {}, 0.0, 11).size() == 45);

  // Pairs with fewer retained answers come first.
  std::unordered_map<std::string, int> counts;
  for (int i = 0; i < 45; ++i) counts[srfid::testing::pair_name("p", i)] = i < 40 ? 3 : 1;
  const auto q5 = build_queue(pairs, {}, counts, 0.0, 11);
  for (int i = 0; i < 5; ++i) CHECK(counts[q5[static_cast<std::size_t>(i)]] == 1);
}

TEST_CASE("service: session flow, ordering and dedup") {
  TempDir dir;
  srfid::testing::write_study(dir / "data", dir / "images", srfid::testing::synthetic_pairs(10, 2));
  Running srv(make_config(dir, 0.2));
  auto c = srv.client();

  post(c, "/api/session", Json{{"annotator_name", "  "}}, 400);
  post(c, "/api/session", Json{{"name", "x"}}, 400);
  const Json created = post(c, "/api/session", Json{{"annotator_name", " alice "}}, 200);
  CHECK(created["annotator_id"] == "alice");
  CHECK(created["total_pairs"] == 12);  // 10 regular + ceil(10/5) traps
  const std::string sid = created["session_id"];

  get(c, "/api/session/nope/next", 404);
  answer(c, "nope", "p000", "yes", 404);

  Json head = get(c, "/api/session/" + sid + "/next", 200);
  CHECK(get(c, "/api/session/" + sid + "/next", 200) == head);  // next does not consume
  CHECK(head["remaining"] == 12);
  const std::string first = head["pair_id"];
  CHECK(head["gt_url"] == "/images/" + first + "/gt");

  post(c, "/api/session/" + sid + "/answer", Json{{"pair_id", first}, {"answer", "maybe"}}, 400);
  post(c, "/api/session/" + sid + "/answer", Json{{"pair_id", first}, {"answer", "yes"}, {"latency_ms", -1}}, 400);
  const Json ack = answer(c, sid, first, "yes", 200);
  CHECK(ack["accepted"] == true);
  CHECK(ack["remaining"] == 11);
  answer(c, sid, first, "yes", 409);  // duplicate

  // Answering two positions ahead is rejected and does not advance.
  head = get(c, "/api/session/" + sid + "/next", 200);
  const std::string second = head["pair_id"];
  const std::string other = second == "p005" ? "p006" : "p005";
  answer(c, sid, other, "no", 409);
  CHECK(get(c, "/api/session/" + sid + "/next", 200)["pair_id"] == second);

  // Resume: a new session for the same name skips the answered pair.
  const Json resumed = post(c, "/api/session", Json{{"annotator_name", "alice"}}, 200);
  CHECK(resumed["total_pairs"] == 11);

  // Drain the first session; the second then skips what the first answered.
  std::set<std::string> assigned;
  for (;;) {
    head = get(c, "/api/session/" + sid + "/next", 200);
    if (head.contains("done")) break;
    assigned.insert(head["pair_id"].get<std::string>());
    answer(c, sid, head["pair_id"], "no", 200);
  }
  CHECK(head["done"] == true);
  answer(c, sid, "p000", "no", 409);  // exhausted
  CHECK(get(c, "/api/session/" + resumed["session_id"].get<std::string>() + "/next", 200)["done"] == true);
  CHECK(srv.server.store().answered_by("alice").size() == 12);
  CHECK(srv.server.store().event_count() == 12);
}

TEST_CASE("service: concurrent duplicate sessions stay deduplicated") {
  TempDir dir;
  srfid::testing::write_study(dir / "data", dir / "images", srfid::testing::synthetic_pairs(8, 0));
  Running srv(make_config(dir));
  std::vector<std::string> sids(2);
  std::vector<std::thread> ts;
  for (int k = 0; k < 2; ++k)
    ts.emplace_back([&, k] {
      auto c = srv.client();
      sids[static_cast<std::size_t>(k)] = open_session(c, "bob");
    });
  for (auto& t : ts) t.join();
  CHECK(sids[0] != sids[1]);

  // Both sessions answer their heads in turn until both are done.
  auto c = srv.client();
  int accepted = 0;
  for (int round = 0; round < 40; ++round) {
    const std::string& sid = sids[static_cast<std::size_t>(round % 2)];
    const Json head = get(c, "/api/session/" + sid + "/next", 200);
    if (head.contains("done")) continue;
    auto res = c.Post("/api/session/" + sid + "/answer",
                      Json{{"pair_id", head["pair_id"]}, {"answer", "yes"}, {"latency_ms", 1}}.dump(),
                      "application/json");
    REQUIRE(res);
    if (res->status == 200) ++accepted;
  }
  CHECK(accepted == 8);
  CHECK(srv.server.store().event_count() == 8);
}

TEST_CASE("service: images, export auth and trap information hiding") {
  TempDir dir;
  srfid::testing::write_study(dir / "data", dir / "images", srfid::testing::synthetic_pairs(6, 3));
  std::filesystem::remove(dir / "images" / "sr" / "p001.png");
  Running srv(make_config(dir, 0.5));
  auto c = srv.client();

  auto img = c.Get("/images/p000/gt");
  REQUIRE(img);
  CHECK(img->status == 200);
  CHECK(img->get_header_value("Content-Type") == "image/png");
  std::ifstream in(std::filesystem::path(SRFID_FIXTURE_DIR) / "gray16.png", std::ios::binary);
  const std::string disk((std::istreambuf_iterator<char>(in)), {});
  CHECK(img->body == disk);
  CHECK(c.Get("/images/p000/sr")->status == 200);
  CHECK(c.Get("/images/zzz/gt")->status == 404);
  CHECK(c.Get("/images/p000/xx")->status == 404);
  CHECK(c.Get("/images/p001/sr")->status == 404);

  // Walk the whole queue (traps included) scanning every non-admin body.
  std::vector<std::string> bodies;
  auto created = c.Post("/api/session", Json{{"annotator_name", "carol"}}.dump(), "application/json");
  bodies.push_back(created->body);
  const std::string sid = Json::parse(created->body)["session_id"];
  int traps_seen = 0, answered = 0;
  for (;;) {
    auto res = c.Get("/api/session/" + sid + "/next");
    bodies.push_back(res->body);
    const Json head = Json::parse(res->body);
    if (head.contains("done")) break;
    const std::string id = head["pair_id"];
    traps_seen += id[0] == 't';
    CHECK(head.size() == 4);  // pair_id, gt_url, sr_url, remaining
    auto ack = c.Post("/api/session/" + sid + "/answer",
                      Json{{"pair_id", id}, {"answer", "yes"}, {"latency_ms", 5}}.dump(), "application/json");
    bodies.push_back(ack->body);
    answered += ack->status == 200;
  }
  bodies.push_back(c.Get("/api/progress")->body);
  CHECK(traps_seen == 3);
  CHECK(answered == 9);
  for (const auto& b : bodies) CHECK_FALSE(mentions_trap(b));

  CHECK(c.Get("/api/admin/export?what=events")->status == 401);
  CHECK(c.Get("/api/admin/export?what=events", {{"X-Admin-Token", "wrong"}})->status == 401);
  auto events = c.Get("/api/admin/export?what=events", {{"X-Admin-Token", kToken}});
  CHECK(events->status == 200);
  CHECK(std::count(events->body.begin(), events->body.end(), '\n') == 9);
  auto scores = c.Get("/api/admin/export?what=scores", {{"X-Admin-Token", kToken}});
  CHECK(std::count(scores->body.begin(), scores->body.end(), '\n') == 6);
  auto statuses = c.Get("/api/admin/export?what=statuses", {{"X-Admin-Token", kToken}});
  const Json st = Json::parse(statuses->body);
  CHECK(st["annotator_id"] == "carol");
  CHECK(st["traps_seen"] == 3);
  CHECK(c.Get("/api/admin/export?what=bogus", {{"X-Admin-Token", kToken}})->status == 400);

  const Json progress = get(c, "/api/progress", 200);
  CHECK(progress["events"] == 9);
  CHECK(progress["annotators"] == 1);
}

TEST_CASE("service: empty admin token disables export") {
  TempDir dir;
  srfid::testing::write_study(dir / "data", dir / "images", srfid::testing::synthetic_pairs(2, 0));
  auto cfg = make_config(dir);
  cfg.admin_token.clear();
  Running srv(cfg);
  auto c = srv.client();
  CHECK(c.Get("/api/admin/export?what=events", {{"X-Admin-Token", ""}})->status == 401);
}

TEST_CASE("service: acknowledged answers survive a restart") {
  TempDir dir;
  srfid::testing::write_study(dir / "data", dir / "images", srfid::testing::synthetic_pairs(10, 0));
  std::set<std::string> acked;
  {
    Running srv(make_config(dir));
    auto c = srv.client();
    const std::string sid = open_session(c, "dave");
    for (int i = 0; i < 4; ++i) {
      const std::string id = get(c, "/api/session/" + sid + "/next", 200)["pair_id"];
      answer(c, sid, id, "no", 200);
      acked.insert(id);
    }
  }
  Running srv(make_config(dir));
  auto c = srv.client();
  CHECK(srv.server.store().answered_by("dave") == std::unordered_set<std::string>(acked.begin(), acked.end()));
  CHECK(post(c, "/api/session", Json{{"annotator_name", "dave"}}, 200)["total_pairs"] == 6);
}
