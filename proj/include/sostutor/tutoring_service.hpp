#pragma once

// Stateful owner of profiles, tasks and notifications. Every mutation is
// appended to the event log before it becomes visible.
//
// Locking: transactions on one task are serialized by a per-task mutex;
// state_mu_ guards the maps and is held exclusively only while committing,
// so different tasks progress concurrently. The log sees one writer at a
// time because commits happen under the exclusive lock.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "sostutor/error.hpp"
#include "sostutor/model.hpp"
#include "sostutor/personality.hpp"
#include "sostutor/recommender.hpp"
#include "sostutor/store.hpp"
#include "sostutor/task_engine.hpp"

namespace sostutor {

class TutoringService {
 public:
  // Existing log records are replayed to rebuild state.
  TutoringService(store::EventLog& log, tasks::Clock& clock)
      : log_(log), clock_(clock), state_(store::replay(log.snapshot())) {}

  TutoringService(const TutoringService&) = delete;
  TutoringService& operator=(const TutoringService&) = delete;

  // ---- profiles ----

  StudentProfile create_profile(const StudentProfile& profile) {
    check(profile);
    std::unique_lock lock(state_mu_);
    if (state_.profiles.count(profile.id))
      throw Error(ErrorCode::conflict, "profile " + profile.id + " already exists");
    commit_profile(profile);
    return profile;
  }

  StudentProfile update_profile(const StudentProfile& profile) {
    check(profile);
    std::unique_lock lock(state_mu_);
    if (!state_.profiles.count(profile.id))
      throw Error(ErrorCode::not_found, "no profile " + profile.id);
    commit_profile(profile);
    return profile;
  }

  StudentProfile get_profile(const ProfileId& id) const {
    std::shared_lock lock(state_mu_);
    return find_profile(id);
  }

  bool has_profile(const ProfileId& id) const {
    std::shared_lock lock(state_mu_);
    return state_.profiles.count(id) > 0;
  }

  TraitVector submit_questionnaire(const ProfileId& id, std::span<const int> answers) {
    const TraitVector traits = personality::score_questionnaire(answers);
    std::unique_lock lock(state_mu_);
    StudentProfile p = find_profile(id);
    p.traits = traits;
    commit_profile(p);
    return traits;
  }

  // ---- tasks ----

  tasks::TutoringTask create_task(const ProfileId& requester_id, const SubjectId& subject,
                                  PersonalityPreference preference,
                                  const std::string& description) {
    if (subject.empty()) throw Error(ErrorCode::invalid_argument, "subject must be non-empty");
    recommender::RecommendationQuery query;
    {
      std::shared_lock lock(state_mu_);
      query.requester = find_profile(requester_id);
      query.subject = subject;
      query.preference = preference;
      query.candidate_pool.reserve(state_.profiles.size());
      for (const auto& [id, p] : state_.profiles)
        if (id != requester_id) query.candidate_pool.push_back(p);
    }
    auto recommended = recommender::recommend(query);

    std::unique_lock lock(state_mu_);
    const auto at = clock_.now();
    const std::string id = "task-" + std::to_string(state_.tasks.size() + 1);
    auto tr = tasks::create_task(id, requester_id, subject, preference, description,
                                 std::move(recommended), at);
    append(store::EventKind::task_created, tr.task, at);
    for (const auto& n : tr.notifications) append(store::EventKind::notification_emitted, n, at);
    state_.tasks.emplace(id, tr.task);
    state_.notifications.insert(state_.notifications.end(), tr.notifications.begin(),
                                tr.notifications.end());
    return tr.task;
  }

  tasks::TutoringTask get_task(const tasks::TaskId& id) const {
    std::shared_lock lock(state_mu_);
    auto it = state_.tasks.find(id);
    if (it == state_.tasks.end()) throw Error(ErrorCode::not_found, "no task " + id);
    return it->second;
  }

  // On rejection nothing is logged and the task is unchanged.
  tasks::TutoringTask apply(const tasks::TaskId& task_id, const ProfileId& actor_id,
                            tasks::TransactionKind kind,
                            std::map<std::string, std::string> attributes = {}) {
    std::mutex& task_mu = task_mutex(task_id);
    std::lock_guard task_lock(task_mu);

    const tasks::TutoringTask current = get_task(task_id);
    tasks::TaskTransaction txn{current.next_seq(), task_id, actor_id, kind,
                               std::move(attributes), clock_.now()};
    auto tr = tasks::apply_transaction(current, txn);

    std::unique_lock lock(state_mu_);
    append(store::EventKind::transaction_applied, txn, txn.at);
    for (const auto& n : tr.notifications)
      append(store::EventKind::notification_emitted, n, txn.at);
    state_.tasks[task_id] = tr.task;
    state_.notifications.insert(state_.notifications.end(), tr.notifications.begin(),
                                tr.notifications.end());
    return tr.task;
  }

  // ---- notifications ----

  std::vector<tasks::Notification> list_notifications(const ProfileId& recipient_id,
                                                      bool unread_only) const {
    std::shared_lock lock(state_mu_);
    find_profile(recipient_id);
    std::vector<tasks::Notification> out;
    for (const auto& n : state_.notifications)
      if (n.recipient_id == recipient_id && (!unread_only || !n.read)) out.push_back(n);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.at < b.at; });
    return out;
  }

  tasks::Notification mark_read(const ProfileId& recipient_id, const std::string& notification_id) {
    std::unique_lock lock(state_mu_);
    auto it = std::find_if(state_.notifications.begin(), state_.notifications.end(),
                           [&](const auto& n) { return n.id == notification_id; });
    if (it == state_.notifications.end())
      throw Error(ErrorCode::not_found, "no notification " + notification_id);
    if (it->recipient_id != recipient_id)
      throw Error(ErrorCode::forbidden, "notification belongs to another user");
    if (!it->read) {
      append(store::EventKind::notification_read, json{{"notificationId", notification_id}},
             clock_.now());
      it->read = true;
    }
    return *it;
  }

  store::State snapshot() const {
    std::shared_lock lock(state_mu_);
    return state_;
  }

 private:
  static void check(const StudentProfile& p) {
    auto violations = validate_profile(p);
    if (!violations.empty()) throw ValidationError(std::move(violations));
  }

  // Callers hold state_mu_.
  const StudentProfile& find_profile(const ProfileId& id) const {
    auto it = state_.profiles.find(id);
    if (it == state_.profiles.end()) throw Error(ErrorCode::not_found, "no profile " + id);
    return it->second;
  }

  // Callers hold state_mu_ exclusively.
  void commit_profile(const StudentProfile& p) {
    append(store::EventKind::profile_upserted, p, clock_.now());
    state_.profiles[p.id] = p;
  }

  void append(store::EventKind kind, json payload, Timestamp at) {
    log_.append({log_.last_seq() + 1, at, kind, std::move(payload)});
  }

  std::mutex& task_mutex(const tasks::TaskId& id) {
    std::lock_guard lock(task_locks_mu_);
    auto& slot = task_locks_[id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
  }

  store::EventLog& log_;
  tasks::Clock& clock_;
  mutable std::shared_mutex state_mu_;
  store::State state_;
  std::mutex task_locks_mu_;
  std::map<tasks::TaskId, std::unique_ptr<std::mutex>> task_locks_;
};

}  // namespace sostutor
