#include "orchestrator/pipeline.hpp"

#include <algorithm>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "env/sim_environment.hpp"
#include "env/webdriver_environment.hpp"
#include "html/dom.hpp"
#include "simaut/fixture.hpp"

namespace webprobe::orchestrator {

using nlohmann::json;
using stategraph::StateId;

std::unique_ptr<env::Environment> make_environment(const RunConfig& c) {
  env::SessionOptions session;
  session.login = c.login;
  session.credentials = c.app_specific;
  if (c.app.backend == "sim") {
    auto app = std::make_shared<const simaut::FixtureApp>(simaut::load_fixture(c.app.fixture));
    session.home_url = c.app.url.empty() ? env::SimEnvironment::home_url_of(*app) : c.app.url;
    return std::make_unique<env::SimEnvironment>(app, std::move(session), env::SimOptions{c.action_interval_ms});
  }
  session.home_url = c.app.url;
  env::WebDriverOptions options;
  options.action_interval_ms = c.action_interval_ms;
  options.navigation_timeout_ms = c.navigation_timeout_ms;
  options.browser_name = c.app.browser;
  options.headless = c.app.headless;
  auto transport = std::make_unique<env::HttpWebDriverTransport>(c.app.webdriver_url, c.navigation_timeout_ms + 30000);
  return std::make_unique<env::WebDriverEnvironment>(std::move(transport), std::move(session), options);
}

std::shared_ptr<agents::ChatBackend> make_chat_backend(const RunConfig& c) {
  if (c.agents.backend == "scripted") return std::make_shared<agents::ScriptedBackend>(agents::ScriptedBackend::load(c.agents.script));
  agents::RemoteOptions options;
  options.base_url = c.agents.base_url;
  if (options.base_url.empty()) {
    const char* env_url = std::getenv("WEBPROBE_BASE_URL");
    options.base_url = env_url ? env_url : "https://api.openai.com/v1";
  }
  options.model = c.agents.model;
  if (const char* key = std::getenv(c.agents.api_key_env.c_str())) options.api_key = key;
  return std::make_shared<agents::RemoteBackend>(std::move(options));
}

PipelineParts make_parts(const RunConfig& c) {
  PipelineParts parts;
  parts.env = make_environment(c);
  if (c.mode != Mode::rl_only) parts.chat = make_chat_backend(c);
  return parts;
}

Pipeline::Pipeline(RunConfig config, PipelineParts parts, std::optional<std::filesystem::path> run_dir)
    : config_(std::move(config)),
      env_(std::move(parts.env)),
      actor_(std::move(parts.actor)),
      run_dir_(std::move(run_dir)),
      abstractor_(graph_, config_.explorer.similarity_threshold) {
  if (!env_) throw Error(ErrorCode::invalid_argument, "pipeline needs an environment");
  if (parts.chat)
    chat_ = std::make_shared<agents::InstrumentedBackend>(std::move(parts.chat), &env_->clock(),
                                                          config_.agents.virtual_latency_ms);
  if (!actor_) {
    if (config_.agents.actor == "remote" && chat_)
      actor_ = std::make_unique<agents::RemoteActor>(*chat_, agent_options());
    else
      actor_ = std::make_unique<agents::TextActor>(config_.agents.locate_threshold);
  }
  if (run_dir_) {
    std::filesystem::create_directories(*run_dir_);
    store_ = std::make_unique<explorer::ArtifactStore>(*run_dir_);
  }
  kb_.app_specific = config_.app_specific;
  kb_.coverage_enabled = config_.include_coverage && config_.mode != Mode::no_cr;
  report_.mode = std::string(to_string(config_.mode));
  report_.seed = config_.seed;
  report_.virtual_time = env_->clock().is_virtual();
}

agents::AgentOptions Pipeline::agent_options() const {
  return {config_.agents.temperature, config_.agents.max_output};
}

void Pipeline::start_clock() {
  start_ms_ = env_->clock().now_ms();
  deadline_ms_ = start_ms_ + config_.total_budget_ms;
  env_->set_deadline(deadline_ms_);
}

std::int64_t Pipeline::now() const { return env_->clock().now_ms(); }

void Pipeline::observe(const env::PageObservation& obs) {
  for (const auto& e : obs.console) {
    console_.push_back(e);
    if (task_fault_counter_ && e.level == env::ConsoleLevel::error) ++*task_fault_counter_;
  }
  sample_coverage(false);
}

std::optional<std::vector<knowledge::CoverageEntry>> Pipeline::current_coverage() {
  try {
    if (auto lcov = env_->coverage_report()) return knowledge::ingest_coverage(*lcov);
    std::error_code ec;
    if (!config_.coverage.lcov_path.empty() && std::filesystem::is_regular_file(config_.coverage.lcov_path, ec))
      return knowledge::ingest_coverage_file(config_.coverage.lcov_path);
  } catch (const Error& e) {
    spdlog::warn("coverage report unusable: {}", e.what());
  }
  return std::nullopt;
}

void Pipeline::sample_coverage(bool force) {
  if (!force && !env_->coverage_report()) return;
  auto entries = current_coverage();
  if (!entries) return;
  std::int64_t covered = 0;
  std::int64_t total = 0;
  for (const auto& e : *entries) {
    covered += e.covered_lines;
    total += e.total_lines;
  }
  if (total == 0 || (covered == last_covered_ && !force)) return;
  if (covered == last_covered_ && !report_.coverage_timeline.empty() &&
      report_.coverage_timeline.back().t_ms == now() - start_ms_)
    return;
  last_covered_ = covered;
  report_.coverage_timeline.push_back(
      {now() - start_ms_, covered, total, knowledge::make_coverage_entry("", covered, total).percent_hundredths});
}

void Pipeline::sample_graph() {
  auto t = now() - start_ms_;
  if (!report_.graph_timeline.empty()) {
    auto& last = report_.graph_timeline.back();
    if (last.states == graph_.state_count() && last.edges == graph_.edge_count()) return;
    if (last.t_ms == t) {
      last.states = graph_.state_count();
      last.edges = graph_.edge_count();
      return;
    }
  }
  report_.graph_timeline.push_back({t, graph_.state_count(), graph_.edge_count()});
}

void Pipeline::register_home() {
  auto obs = env_->reset();
  observe(obs);
  auto home = abstractor_.abstract(obs, step_);
  if (home.is_new && store_) {
    auto ref = store_->save_page(step_, obs);
    graph_.mutable_state(home.id).exemplar_html = ref + ".html";
    graph_.mutable_state(home.id).exemplar_png = ref + ".png";
  }
}

void Pipeline::phase_explore(explorer::ExploreBudget budget) {
  auto begin = now();
  auto cfg = config_.explorer;
  cfg.seed = config_.seed;
  explorer::Explorer explorer(cfg, config_.app_specific);
  explorer.on_observation([this](const env::PageObservation& obs) { observe(obs); });
  auto result = explorer.explore(*env_, abstractor_, budget, store_.get());
  if (!result.trace.empty()) step_ = result.trace.back().step;
  episode_ = result.episodes;
  report_.exploration_actions = static_cast<int>(result.trace.size());
  report_.exploration_ms = now() - begin;
  sample_graph();
}

std::string Pipeline::describe(StateId id) {
  const auto& shots = abstractor_.screenshots();
  auto it = shots.find(id);
  if (it == shots.end() || it->second.empty())
    throw Error(ErrorCode::not_found, "no screenshot for State " + std::to_string(id));
  return agents::summarize_state(*chat_, it->second, agent_options());
}

void Pipeline::phase_build_kb() {
  auto begin = now();
  if (kb_.coverage_enabled) {
    if (auto entries = current_coverage()) kb_.coverage = knowledge::select_low_coverage(*entries, config_.coverage_cap);
  }
  knowledge::describe_missing(kb_, graph_, [this](StateId id) { return describe(id); });
  kb_.transitions = graph_.list_transitions();
  kb_text_ = knowledge::render(kb_);
  report_.kb_construction_ms = now() - begin;
  deadline_ms_ += report_.kb_construction_ms;
  env_->set_deadline(deadline_ms_);
}

TaskOutcome Pipeline::execute_task(knowledge::TestingTask& task) {
  TaskOutcome out;
  out.task_id = task.id;
  out.description = task.description;
  out.origin_round = task.origin_round;
  out.started_at = now() - start_ms_;
  task_fault_counter_ = &out.faults_observed;
  auto opts = agent_options();
  int episode = ++episode_;

  auto finish_task = [&](knowledge::TaskStatus status) {
    out.status = status;
    task_fault_counter_ = nullptr;
    knowledge::ExecutionFeedback feedback;
    feedback.task_id = task.id;
    feedback.status = status;
    feedback.coverage_cap = config_.coverage_cap;
    if (kb_.coverage_enabled && config_.coverage.refresh) feedback.refreshed_coverage = current_coverage();
    knowledge::update_from_execution(kb_, graph_, [this](StateId id) { return describe(id); }, feedback);
    task.status = status;
    out.finished_at = now() - start_ms_;
    sample_graph();
    return out;
  };

  env::PageObservation obs;
  try {
    obs = env_->reset();
    observe(obs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::budget_exhausted) budget_spent_ = true;
    spdlog::warn("task {}: reset failed: {}", task.id, e.what());
    return finish_task(knowledge::TaskStatus::failed);
  }
  auto current = abstractor_.abstract(obs, step_);
  if (current.is_new) ++out.new_states;

  std::optional<std::string> key_path;
  if (config_.mode != Mode::no_stg) {
    try {
      out.key_state = agents::navigate_select(*chat_, task.description, knowledge::render_graph_sections(kb_),
                                              [this](StateId id) { return graph_.contains(id); }, opts);
      stategraph::KeyPath path;
      try {
        path = graph_.shortest_path(stategraph::kHomeState, out.key_state);
      } catch (const Error& e) {
        spdlog::warn("task {}: {}; planning without a route", task.id, e.what());
      }
      key_path = agents::render_key_path(path, stategraph::kHomeState, kb_.descriptions);
    } catch (const Error& e) {
      spdlog::warn("task {}: navigator failed: {}", task.id, e.what());
      key_path = agents::render_key_path({}, stategraph::kHomeState, kb_.descriptions);
    }
  }

  std::vector<agents::HistoryEntry> history;
  int not_found_streak = 0;
  while (out.steps_taken < config_.step_cap_per_task) {
    agents::PlannerInput input{task.description, key_path, agents::gui_digest(explorer::extract_actions(obs.html)),
                               obs.screenshot, history};
    agents::PlannedAction plan;
    try {
      plan = agents::plan_step(*chat_, input, opts);
    } catch (const Error& e) {
      spdlog::warn("task {}: planner failed: {}", task.id, e.what());
      ++out.steps_taken;
      return finish_task(knowledge::TaskStatus::aborted);
    }
    ++out.steps_taken;
    if (plan.decision == agents::Decision::done) return finish_task(knowledge::TaskStatus::succeeded);
    if (plan.decision == agents::Decision::abort) return finish_task(knowledge::TaskStatus::aborted);

    env::GuiAction action;
    action.kind = plan.kind;
    if (plan.kind == env::ActionKind::input || plan.kind == env::ActionKind::select) action.value = plan.value;
    if (plan.kind != env::ActionKind::back) {
      try {
        auto located = actor_->locate(plan.element_description, obs, *env_);
        action.target_xpath = located.xpath;
        auto doc = html::Document::parse(obs.html);
        if (const auto* el = html::resolve_xpath(doc, located.xpath)) action.target_text = html::text_content(*el);
      } catch (const Error& e) {
        if (++not_found_streak >= 2) return finish_task(knowledge::TaskStatus::aborted);
        history.push_back({plan, e.code() == ErrorCode::not_found ? "failed: no element matches the description"
                                                                  : "failed: " + std::string(to_string(e.code()))});
        continue;
      }
    }
    not_found_streak = 0;

    env::PageObservation next;
    try {
      next = env_->perform(action);
      observe(next);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::budget_exhausted) {
        budget_spent_ = true;
        return finish_task(knowledge::TaskStatus::failed);
      }
      history.push_back({plan, "failed: " + std::string(to_string(e.code()))});
      continue;
    }

    ++step_;
    auto ref = store_ ? store_->save_page(step_, next) : std::string();
    auto post = abstractor_.abstract(next, step_);
    if (post.is_new) {
      ++out.new_states;
      if (!ref.empty()) {
        graph_.mutable_state(post.id).exemplar_html = ref + ".html";
        graph_.mutable_state(post.id).exemplar_png = ref + ".png";
      }
    }
    if (graph_.record_transition(current.id, action, post.id, step_) == stategraph::RecordOutcome::created)
      ++out.new_edges;
    explorer::TraceRecord rec{step_, episode, current.id, action, post.id, ref, next.captured_at, task.id};
    if (store_) store_->append_trace(rec);
    current = post;
    obs = std::move(next);
    history.push_back({plan, "ok"});
  }
  return finish_task(knowledge::TaskStatus::failed);
}

void Pipeline::phase_tasks() {
  int empty_rounds = 0;
  auto opts = agent_options();
  while (!budget_spent_ && now() < deadline_ms_) {
    ++report_.rounds;
    int round = report_.rounds;
    std::vector<std::string> proposed;
    try {
      proposed = agents::revise_tasks(*chat_, knowledge::render(kb_), config_.max_tasks_per_round, opts);
    } catch (const Error& e) {
      spdlog::warn("round {}: reviser failed: {}", round, e.what());
    }
    std::vector<std::size_t> fresh;
    for (auto& description : proposed) {
      auto key = text::to_lower(text::collapse_whitespace(description));
      if (std::find(task_ledger_.begin(), task_ledger_.end(), key) != task_ledger_.end()) continue;
      task_ledger_.push_back(key);
      kb_.tasks.push_back({static_cast<int>(kb_.tasks.size()) + 1, description, knowledge::TaskStatus::pending, round});
      fresh.push_back(kb_.tasks.size() - 1);
    }
    if (fresh.empty()) {
      if (++empty_rounds >= 3) {
        spdlog::info("three rounds without new tasks; idling until the budget ends");
        if (env_->clock().is_virtual()) env_->clock().sleep_until(deadline_ms_);
        break;
      }
      continue;
    }
    empty_rounds = 0;
    for (auto index : fresh) {
      if (budget_spent_ || now() >= deadline_ms_) break;
      auto task = kb_.tasks[index];
      auto outcome = execute_task(task);
      kb_.tasks[index].status = task.status;
      report_.tasks.push_back(std::move(outcome));
    }
  }
  kb_text_ = knowledge::render(kb_);
}

RunReport Pipeline::finish() {
  sample_coverage(true);
  sample_graph();
  report_.elapsed_ms = now() - start_ms_ - report_.kb_construction_ms;
  report_.agent_requests = chat_ ? chat_->request_count() : 0;
  report_.faults = collect_faults(console_);
  report_.console_errors = 0;
  for (const auto& e : console_)
    if (e.level == env::ConsoleLevel::error) ++report_.console_errors;
  if (auto* sim = dynamic_cast<env::SimEnvironment*>(env_.get())) {
    report_.covered_functionalities.clear();
    for (const auto& [name, range] : sim->app().functionalities)
      if (sim->coverage().is_covered(name)) report_.covered_functionalities.push_back(name);
  }
  if (run_dir_) {
    const auto& dir = *run_dir_;
    files::write_text(dir / "graph" / "graph.json", graph_.to_json().dump(2) + "\n");
    if (auto lcov = env_->coverage_report()) files::write_text(dir / "coverage.lcov", *lcov);
    if (!kb_text_.empty()) {
      files::write_text(dir / "kb.txt", kb_text_);
      files::write_text(dir / "kb.json", knowledge::to_json(kb_).dump(2) + "\n");
    }
    files::write_text(dir / "report.json", to_json(report_).dump(2) + "\n");
    files::write_text(dir / "report.txt", render_report_text(report_));
  }
  return report_;
}

RunReport Pipeline::run() {
  start_clock();
  switch (config_.mode) {
    case Mode::rl_only:
      phase_explore({std::max<std::int64_t>(0, deadline_ms_ - now()), std::nullopt});
      return finish();
    case Mode::llm_only:
      register_home();
      break;
    default:
      phase_explore(config_.exploration_budget);
      break;
  }
  if (!chat_) throw Error(ErrorCode::config_error, "mode " + report_.mode + " needs a chat backend");
  phase_build_kb();
  sample_coverage(true);
  phase_tasks();
  return finish();
}

RunReport Pipeline::explore_only() {
  start_clock();
  phase_explore(config_.exploration_budget);
  return finish();
}

RunReport run_pipeline(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir) {
  validate(config);
  Pipeline pipeline(config, make_parts(config), run_dir);
  return pipeline.run();
}

RunReport run_exploration(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir) {
  validate(config);
  auto explore_config = config;
  explore_config.mode = Mode::rl_only;
  PipelineParts parts;
  parts.env = make_environment(explore_config);
  Pipeline pipeline(explore_config, std::move(parts), run_dir);
  auto report = pipeline.explore_only();
  return report;
}

std::string build_kb(const std::filesystem::path& run_dir, const RunConfig* config, bool include_coverage) {
  auto graph_file = run_dir / "graph" / "graph.json";
  auto trace_file = run_dir / "trace" / "trace.jsonl";
  std::error_code ec;
  if (!std::filesystem::is_regular_file(graph_file, ec) || !std::filesystem::is_regular_file(trace_file, ec))
    throw Error(ErrorCode::missing_artifacts, "run directory has no stored graph and trace: " + run_dir.string());

  stategraph::StateTransitionGraph stored;
  try {
    stored = stategraph::StateTransitionGraph::from_json(json::parse(files::read_text(graph_file)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::missing_artifacts, std::string("graph.json is corrupt: ") + e.what());
  }

  // Re-derive the edge set by replaying the trace over the stored states.
  stategraph::StateTransitionGraph graph;
  for (auto s : stored.states()) graph.add_state(std::move(s));
  for (const auto& rec : explorer::load_trace(trace_file)) {
    try {
      graph.record_transition(rec.pre_state, rec.action, rec.post_state, rec.step);
    } catch (const Error& e) {
      throw Error(ErrorCode::missing_artifacts, "trace does not match the stored graph: " + std::string(e.what()));
    }
  }

  knowledge::KnowledgeBase kb;
  auto kb_file = run_dir / "kb.json";
  if (std::filesystem::is_regular_file(kb_file, ec)) {
    auto prior = knowledge::kb_from_json(json::parse(files::read_text(kb_file)));
    kb.descriptions = std::move(prior.descriptions);
    kb.app_specific = std::move(prior.app_specific);
    kb.tasks = std::move(prior.tasks);
  }
  if (config) kb.app_specific = config->app_specific;

  std::function<std::string(StateId)> describe;
  std::shared_ptr<agents::ChatBackend> scripted;
  if (config && config->agents.backend == "scripted" && !config->agents.script.empty()) {
    scripted = std::make_shared<agents::ScriptedBackend>(agents::ScriptedBackend::load(config->agents.script));
    describe = [&](StateId id) {
      const auto& rel = graph.state(id).exemplar_png;
      if (rel.empty()) throw Error(ErrorCode::not_found, "no stored screenshot");
      return agents::summarize_state(*scripted, files::read_bytes(run_dir / rel),
                                     {config->agents.temperature, config->agents.max_output});
    };
  }
  knowledge::describe_missing(kb, graph, describe);
  kb.transitions = graph.list_transitions();

  kb.coverage_enabled = include_coverage;
  if (include_coverage) {
    auto lcov = run_dir / "coverage.lcov";
    std::filesystem::path source;
    if (std::filesystem::is_regular_file(lcov, ec)) source = lcov;
    else if (config && !config->coverage.lcov_path.empty()) source = config->coverage.lcov_path;
    if (!source.empty() && std::filesystem::is_regular_file(source, ec))
      kb.coverage = knowledge::select_low_coverage(knowledge::ingest_coverage_file(source),
                                                   config ? config->coverage_cap : knowledge::kDefaultCoverageCap);
  }

  auto text = knowledge::render(kb);
  files::write_text(run_dir / "kb.txt", text);
  files::write_text(run_dir / "kb.json", knowledge::to_json(kb).dump(2) + "\n");
  return text;
}

}  // namespace webprobe::orchestrator
