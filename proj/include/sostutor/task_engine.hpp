#pragma once

// Tutoring-request lifecycle. Tasks change only through transactions; each
// accepted transaction yields a new task value plus the notifications it
// causes. Everything here is pure; TutoringService adds state and locking.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/model.hpp"
#include "sostutor/recommender.hpp"

namespace sostutor::tasks {

using TaskId = std::string;

enum class TaskState { open, pending_selection, completed, cancelled, expired };

enum class TransactionKind { create, volunteer, decline, best_response, cancel };

enum class ResponseKind { volunteered, declined };

enum class NotificationKind {
  tutoring_requested,
  tutor_volunteered,
  tutor_declined_all,
  tutor_selected,
  task_cancelled,
};

inline bool is_terminal(TaskState s) {
  return s == TaskState::completed || s == TaskState::cancelled || s == TaskState::expired;
}

struct TaskTransaction {
  std::uint64_t seq = 0;
  TaskId task_id;
  ProfileId actor_id;
  TransactionKind kind = TransactionKind::create;
  // bestResponse carries "chosenTutorId".
  std::map<std::string, std::string> attributes;
  Timestamp at{};

  friend bool operator==(const TaskTransaction&, const TaskTransaction&) = default;
};

struct Notification {
  std::string id;
  ProfileId recipient_id;
  TaskId task_id;
  NotificationKind kind = NotificationKind::tutoring_requested;
  Timestamp at{};
  bool read = false;

  friend bool operator==(const Notification&, const Notification&) = default;
};

struct TutoringTask {
  TaskId id;
  ProfileId requester_id;
  SubjectId subject;
  PersonalityPreference preference = PersonalityPreference::indifferent;
  std::string description;
  Timestamp created_at{};
  TaskState state = TaskState::open;
  recommender::RecommendationList recommended;
  std::map<ProfileId, ResponseKind> responses;
  std::optional<ProfileId> selected_tutor_id;
  // Accepted transactions, seq 1 is always the create.
  std::vector<TaskTransaction> history;

  bool is_recommended(const ProfileId& id) const {
    return std::any_of(recommended.begin(), recommended.end(),
                       [&](const auto& c) { return c.candidate_id == id; });
  }

  std::uint64_t next_seq() const { return history.size() + 1; }

  friend bool operator==(const TutoringTask&, const TutoringTask&) = default;
};

struct Transition {
  TutoringTask task;
  std::vector<Notification> notifications;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
  }
};

// Starts at a fixed instant and advances by a fixed step on every read.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = Timestamp{std::chrono::milliseconds{1'700'000'000'000}},
                       std::chrono::milliseconds step = std::chrono::milliseconds{1})
      : now_ms_(start.time_since_epoch().count()), step_ms_(step.count()) {}

  Timestamp now() override {
    return Timestamp{std::chrono::milliseconds{now_ms_.fetch_add(step_ms_)}};
  }

  void advance(std::chrono::milliseconds d) { now_ms_.fetch_add(d.count()); }

 private:
  std::atomic<std::int64_t> now_ms_;
  std::int64_t step_ms_;
};

namespace detail {

inline Notification make_notification(const TutoringTask& task, std::uint64_t seq,
                                      std::size_t index, const ProfileId& recipient,
                                      NotificationKind kind, Timestamp at) {
  return {task.id + "." + std::to_string(seq) + "." + std::to_string(index), recipient, task.id,
          kind, at, false};
}

}  // namespace detail

// Builds a fresh open task from an already computed recommendation list.
inline Transition create_task(TaskId id, const ProfileId& requester_id, SubjectId subject,
                              PersonalityPreference preference, std::string description,
                              recommender::RecommendationList recommended, Timestamp at) {
  if (subject.empty()) throw Error(ErrorCode::invalid_argument, "subject must be non-empty");
  TutoringTask task;
  task.id = std::move(id);
  task.requester_id = requester_id;
  task.subject = std::move(subject);
  task.preference = preference;
  task.description = std::move(description);
  task.created_at = at;
  task.recommended = std::move(recommended);
  task.history.push_back({1, task.id, requester_id, TransactionKind::create, {}, at});

  Transition out{std::move(task), {}};
  for (std::size_t i = 0; i < out.task.recommended.size(); ++i) {
    out.notifications.push_back(detail::make_notification(
        out.task, 1, i, out.task.recommended[i].candidate_id,
        NotificationKind::tutoring_requested, at));
  }
  return out;
}

// Throws Error on rejection; the input task is never modified.
inline Transition apply_transaction(const TutoringTask& task, const TaskTransaction& txn) {
  if (txn.task_id != task.id)
    throw Error(ErrorCode::invalid_argument, "transaction targets task " + txn.task_id);
  if (txn.seq != task.next_seq())
    throw Error(ErrorCode::invalid_argument, "transaction seq " + std::to_string(txn.seq) +
                                                 " but next is " +
                                                 std::to_string(task.next_seq()));

  Transition out{task, {}};
  TutoringTask& next = out.task;
  auto notify = [&](const ProfileId& recipient, NotificationKind kind) {
    out.notifications.push_back(detail::make_notification(
        task, txn.seq, out.notifications.size(), recipient, kind, txn.at));
  };

  switch (txn.kind) {
    case TransactionKind::create:
      throw Error(ErrorCode::invalid_argument, "create is only valid as the first transaction");

    case TransactionKind::volunteer:
    case TransactionKind::decline: {
      if (!task.is_recommended(txn.actor_id))
        throw Error(ErrorCode::forbidden, txn.actor_id + " was not recommended for this task");
      if (task.state != TaskState::open && task.state != TaskState::pending_selection)
        throw Error(ErrorCode::invalid_transition, "task no longer accepts responses");
      if (task.responses.count(txn.actor_id))
        throw Error(ErrorCode::conflict, txn.actor_id + " already responded");

      if (txn.kind == TransactionKind::volunteer) {
        next.responses[txn.actor_id] = ResponseKind::volunteered;
        next.state = TaskState::pending_selection;
        notify(task.requester_id, NotificationKind::tutor_volunteered);
      } else {
        next.responses[txn.actor_id] = ResponseKind::declined;
        const bool everyone_declined =
            next.responses.size() == task.recommended.size() &&
            std::all_of(next.responses.begin(), next.responses.end(),
                        [](const auto& r) { return r.second == ResponseKind::declined; });
        if (everyone_declined) {
          next.state = TaskState::expired;
          notify(task.requester_id, NotificationKind::tutor_declined_all);
        }
      }
      break;
    }

    case TransactionKind::best_response: {
      if (txn.actor_id != task.requester_id)
        throw Error(ErrorCode::forbidden, "only the requester can select a tutor");
      if (task.state != TaskState::pending_selection)
        throw Error(ErrorCode::invalid_transition, "no volunteer to select from");
      auto chosen = txn.attributes.find("chosenTutorId");
      if (chosen == txn.attributes.end() || chosen->second.empty())
        throw Error(ErrorCode::invalid_argument, "bestResponse requires chosenTutorId");
      auto r = task.responses.find(chosen->second);
      if (r == task.responses.end() || r->second != ResponseKind::volunteered)
        throw Error(ErrorCode::invalid_argument, chosen->second + " has not volunteered");
      next.state = TaskState::completed;
      next.selected_tutor_id = chosen->second;
      notify(chosen->second, NotificationKind::tutor_selected);
      break;
    }

    case TransactionKind::cancel: {
      if (txn.actor_id != task.requester_id)
        throw Error(ErrorCode::forbidden, "only the requester can cancel");
      if (task.state != TaskState::open && task.state != TaskState::pending_selection)
        throw Error(ErrorCode::invalid_transition, "task already closed");
      next.state = TaskState::cancelled;
      for (const auto& c : task.recommended) {
        auto r = task.responses.find(c.candidate_id);
        if (r != task.responses.end() && r->second == ResponseKind::declined) continue;
        notify(c.candidate_id, NotificationKind::task_cancelled);
      }
      break;
    }
  }
  next.history.push_back(txn);
  return out;
}

// Empty result means the task satisfies every lifecycle invariant.
inline std::vector<std::string> check_invariants(const TutoringTask& t) {
  std::vector<std::string> bad;
  for (const auto& [id, _] : t.responses) {
    if (!t.is_recommended(id)) bad.push_back("response from non-recommended " + id);
  }
  if (t.selected_tutor_id) {
    if (t.state != TaskState::completed) bad.push_back("selected tutor on non-completed task");
    auto r = t.responses.find(*t.selected_tutor_id);
    if (r == t.responses.end() || r->second != ResponseKind::volunteered)
      bad.push_back("selected tutor did not volunteer");
  }
  if (t.state == TaskState::completed && !t.selected_tutor_id)
    bad.push_back("completed without selection");
  if (t.state == TaskState::pending_selection &&
      std::none_of(t.responses.begin(), t.responses.end(),
                   [](const auto& r) { return r.second == ResponseKind::volunteered; }))
    bad.push_back("pendingSelection without a volunteer");
  if (t.history.empty() || t.history.front().kind != TransactionKind::create)
    bad.push_back("history does not start with create");
  for (std::size_t i = 0; i < t.history.size(); ++i) {
    if (t.history[i].seq != i + 1) bad.push_back("transaction seq not dense");
    if (i > 0 && t.history[i].kind == TransactionKind::create) bad.push_back("repeated create");
  }
  return bad;
}

// ---- text forms ----

inline const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::open: return "open";
    case TaskState::pending_selection: return "pendingSelection";
    case TaskState::completed: return "completed";
    case TaskState::cancelled: return "cancelled";
    case TaskState::expired: return "expired";
  }
  return "open";
}

inline std::optional<TaskState> parse_task_state(std::string_view s) {
  for (auto v : {TaskState::open, TaskState::pending_selection, TaskState::completed,
                 TaskState::cancelled, TaskState::expired})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

inline const char* to_string(TransactionKind k) {
  switch (k) {
    case TransactionKind::create: return "create";
    case TransactionKind::volunteer: return "volunteer";
    case TransactionKind::decline: return "decline";
    case TransactionKind::best_response: return "bestResponse";
    case TransactionKind::cancel: return "cancel";
  }
  return "create";
}

inline std::optional<TransactionKind> parse_transaction_kind(std::string_view s) {
  for (auto v : {TransactionKind::create, TransactionKind::volunteer, TransactionKind::decline,
                 TransactionKind::best_response, TransactionKind::cancel})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

inline const char* to_string(ResponseKind r) {
  return r == ResponseKind::volunteered ? "volunteered" : "declined";
}

inline const char* to_string(NotificationKind k) {
  switch (k) {
    case NotificationKind::tutoring_requested: return "tutoringRequested";
    case NotificationKind::tutor_volunteered: return "tutorVolunteered";
    case NotificationKind::tutor_declined_all: return "tutorDeclinedAll";
    case NotificationKind::tutor_selected: return "tutorSelected";
    case NotificationKind::task_cancelled: return "taskCancelled";
  }
  return "tutoringRequested";
}

inline std::optional<NotificationKind> parse_notification_kind(std::string_view s) {
  for (auto v : {NotificationKind::tutoring_requested, NotificationKind::tutor_volunteered,
                 NotificationKind::tutor_declined_all, NotificationKind::tutor_selected,
                 NotificationKind::task_cancelled})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

}  // namespace sostutor::tasks
