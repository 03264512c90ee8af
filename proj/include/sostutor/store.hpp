#pragma once

// Event-sourced persistence. The log is line-delimited JSON, one record per
// line, append-only; the in-memory State is a fold over the records.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/json_io.hpp"
#include "sostutor/model.hpp"
#include "sostutor/task_engine.hpp"

namespace sostutor::store {

enum class EventKind {
  profile_upserted,
  task_created,
  transaction_applied,
  notification_emitted,
  notification_read,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::profile_upserted: return "profileUpserted";
    case EventKind::task_created: return "taskCreated";
    case EventKind::transaction_applied: return "transactionApplied";
    case EventKind::notification_emitted: return "notificationEmitted";
    case EventKind::notification_read: return "notificationRead";
  }
  return "profileUpserted";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::profile_upserted, EventKind::task_created,
                 EventKind::transaction_applied, EventKind::notification_emitted,
                 EventKind::notification_read})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct EventRecord {
  std::uint64_t global_seq = 0;
  Timestamp at{};
  EventKind kind = EventKind::profile_upserted;
  json payload;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct State {
  std::map<ProfileId, StudentProfile> profiles;
  std::map<tasks::TaskId, tasks::TutoringTask> tasks;
  // Emission order.
  std::vector<tasks::Notification> notifications;

  friend bool operator==(const State&, const State&) = default;
};

inline json to_json_value(const State& s) {
  json profiles = json::array();
  for (const auto& [_, p] : s.profiles) profiles.push_back(p);
  json task_list = json::array();
  for (const auto& [_, t] : s.tasks) task_list.push_back(t);
  return {{"profiles", profiles}, {"tasks", task_list}, {"notifications", s.notifications}};
}

// Stable textual form; equal states give identical bytes.
inline std::string canonical(const State& s) { return to_json_value(s).dump(); }

inline std::string encode(const EventRecord& r) {
  json j = {{"globalSeq", r.global_seq},
            {"at", format_timestamp(r.at)},
            {"kind", to_string(r.kind)},
            {"payload", r.payload}};
  return j.dump();
}

inline EventRecord decode(const std::string& line, std::uint64_t expected_seq) {
  try {
    const json j = json::parse(line);
    EventRecord r;
    r.global_seq = j.at("globalSeq").get<std::uint64_t>();
    r.at = parse_timestamp(j.at("at").get<std::string>());
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw IntegrityError(r.global_seq, "unknown event kind");
    r.kind = *kind;
    r.payload = j.at("payload");
    return r;
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrityError(expected_seq,
                         "corrupt record at globalSeq " + std::to_string(expected_seq) + ": " +
                             e.what());
  }
}

// Folds one record into the state. Any failure names the record's seq.
inline void apply_event(State& state, const EventRecord& r) {
  auto fail = [&](const std::string& why) -> IntegrityError {
    return IntegrityError(r.global_seq,
                          "record " + std::to_string(r.global_seq) + " rejected: " + why);
  };
  try {
    switch (r.kind) {
      case EventKind::profile_upserted: {
        auto p = r.payload.get<StudentProfile>();
        if (!validate_profile(p).empty()) throw fail("invalid profile " + p.id);
        state.profiles[p.id] = std::move(p);
        break;
      }
      case EventKind::task_created: {
        auto t = r.payload.get<tasks::TutoringTask>();
        if (state.tasks.count(t.id)) throw fail("duplicate task " + t.id);
        if (!state.profiles.count(t.requester_id)) throw fail("unknown requester " + t.requester_id);
        state.tasks.emplace(t.id, std::move(t));
        break;
      }
      case EventKind::transaction_applied: {
        auto txn = r.payload.get<tasks::TaskTransaction>();
        auto it = state.tasks.find(txn.task_id);
        if (it == state.tasks.end()) throw fail("unknown task " + txn.task_id);
        // Notifications are logged as their own records.
        it->second = tasks::apply_transaction(it->second, txn).task;
        break;
      }
      case EventKind::notification_emitted: {
        auto n = r.payload.get<tasks::Notification>();
        if (!state.profiles.count(n.recipient_id)) throw fail("unknown recipient " + n.recipient_id);
        state.notifications.push_back(std::move(n));
        break;
      }
      case EventKind::notification_read: {
        const auto id = r.payload.at("notificationId").get<std::string>();
        auto it = std::find_if(state.notifications.begin(), state.notifications.end(),
                               [&](const auto& n) { return n.id == id; });
        if (it == state.notifications.end()) throw fail("unknown notification " + id);
        it->read = true;
        break;
      }
    }
  } catch (const IntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
}

inline State replay(const std::vector<EventRecord>& records) {
  State state;
  std::uint64_t expected = 1;
  for (const auto& r : records) {
    if (r.global_seq != expected)
      throw IntegrityError(r.global_seq, "sequence break: expected " + std::to_string(expected) +
                                             ", found " + std::to_string(r.global_seq));
    apply_event(state, r);
    ++expected;
  }
  return state;
}

inline std::vector<EventRecord> read_log(const std::filesystem::path& path) {
  std::vector<EventRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return out;
    throw Error(ErrorCode::io, "cannot read " + path.string());
  }
  std::string line;
  std::uint64_t expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = decode(line, expected);
    if (r.global_seq != expected)
      throw IntegrityError(r.global_seq, "sequence break: expected " + std::to_string(expected) +
                                             ", found " + std::to_string(r.global_seq));
    out.push_back(std::move(r));
    ++expected;
  }
  return out;
}

// Append-only log with a single-writer contract; in-memory when constructed
// without a path.
class EventLog {
 public:
  EventLog() = default;

  explicit EventLog(std::filesystem::path path) : path_(std::move(path)) {
    records_ = read_log(path_);
    file_.reset(std::fopen(path_.c_str(), "ab"));
    if (!file_) throw Error(ErrorCode::io, "cannot open " + path_.string() + " for append");
  }

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  std::uint64_t last_seq() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  // Durable (flushed and fsynced) before returning when file-backed.
  void append(const EventRecord& record) {
    std::lock_guard lock(mu_);
    const std::uint64_t last = records_.size();
    if (record.global_seq != last + 1)
      throw IntegrityError(record.global_seq, "append of globalSeq " +
                                                  std::to_string(record.global_seq) +
                                                  " after " + std::to_string(last));
    if (file_) {
      const std::string line = encode(record) + "\n";
      if (std::fwrite(line.data(), 1, line.size(), file_.get()) != line.size() ||
          std::fflush(file_.get()) != 0 || ::fsync(::fileno(file_.get())) != 0)
        throw Error(ErrorCode::io, "write to " + path_.string() + " failed");
    }
    records_.push_back(record);
  }

  std::vector<EventRecord> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
  };

  std::filesystem::path path_;
  std::unique_ptr<std::FILE, FileCloser> file_;
  mutable std::mutex mu_;
  std::vector<EventRecord> records_;
};

}  // namespace sostutor::store
