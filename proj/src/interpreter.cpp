#include "aspectlab/interpreter.hpp"

#include <pthread.h>

#include <algorithm>
#include <climits>
#include <functional>
#include <map>

#include "stmt_parser.hpp"

namespace aspectlab {

int precedence_rank(const std::vector<AspectDef>& aspects, const std::string& aspect_name) {
  int rank = 0;
  for (const auto& a : aspects) {
    for (const auto& pattern : a.precedence) {
      if (match_name_pattern(NamePattern{pattern}, aspect_name).matched) return rank;
      ++rank;
    }
  }
  return INT_MAX;
}

Runtime::Runtime(ProgramModel model, std::vector<AspectDef> aspects)
    : model_(std::move(model)),
      aspects_(std::move(aspects)),
      shadows_(compute_shadows(model_)),
      matcher_(model_, shadows_),
      hash_(fnv1a_hex(dump_model(model_) + "\n" + dump_aspects(aspects_))) {
  for (std::size_t a = 0; a < aspects_.size(); ++a) {
    if (aspects_[a].is_abstract) continue;
    for (std::size_t i = 0; i < aspects_[a].advice.size(); ++i) order_.push_back({a, i});
  }
  std::vector<int> ranks;
  for (const auto& a : aspects_) ranks.push_back(precedence_rank(aspects_, a.name));
  std::stable_sort(order_.begin(), order_.end(), [&](const AdviceRef& l, const AdviceRef& r) {
    if (ranks[l.aspect] != ranks[r.aspect]) return ranks[l.aspect] < ranks[r.aspect];
    if (aspects_[l.aspect].name != aspects_[r.aspect].name) {
      return aspects_[l.aspect].name < aspects_[r.aspect].name;
    }
    return l.index < r.index;
  });
}

std::unique_ptr<Runtime> Runtime::build(const ProgramModel& base, std::vector<AspectDef> aspects) {
  ProgramModel woven = weave_static(base, aspects);
  return std::unique_ptr<Runtime>(new Runtime(std::move(woven), std::move(aspects)));
}

namespace {

using Objects = std::map<std::string, RuntimeObject>;

struct Frame {
  std::optional<RuntimeObject> self;
  std::string declaring_type;  // type whose code is running; empty in advice
  Objects locals;
  const Objects* bindings = nullptr;
  std::string branch_owner;  // empty: branches not recorded
  const std::function<void()>* proceed = nullptr;
};

class Execution {
 public:
  Execution(const Runtime& rt, const ExecOptions& options, RunLog& log) : rt_(rt), opt_(options), log_(log) {}

  void run(const Scenario& scenario) {
    for (const auto& step : scenario.steps) {
      if (step.kind == ScenarioStep::Kind::kNew) {
        env_[step.variable] = create(step.name);
        continue;
      }
      auto it = env_.find(step.variable);
      if (it == env_.end()) {
        throw Error(ErrorCode::kRuntimeBinding, "unbound variable '" + step.variable + "'", step.line);
      }
      RuntimeObject target = it->second;
      DispatchTarget d = resolve_dispatch(rt_.model(), target.class_name, step.name, step.arity);
      execute_method(d, target);
    }
  }

 private:
  RuntimeObject create(const std::string& written) {
    auto q = rt_.model().resolve(written);
    const TypeDecl* decl = q ? rt_.model().find(*q) : nullptr;
    if (decl == nullptr || decl->is_interface()) {
      throw Error(ErrorCode::kUnknownType, "cannot instantiate '" + written + "'");
    }
    return RuntimeObject{decl->name, ++serial_};
  }

  void record(TraceEvent e) {
    e.join_point = jp_stack_.empty() ? -1 : jp_stack_.back();
    log_.trace.push_back(std::move(e));
  }

  struct Matched {
    Runtime::AdviceRef ref;
    Objects bindings;
  };

  void join_point(int shadow, const std::optional<RuntimeObject>& self, const std::optional<RuntimeObject>& target,
                  const std::function<void()>& body) {
    int jp = next_jp_++;
    stack_.push_back(shadow);
    jp_stack_.push_back(jp);
    JoinPoint point{shadow, self, target, stack_};
    const Matcher& m = rt_.matcher();
    const auto& aspects = rt_.aspects();
    for (const auto& aspect : aspects) {
      if (aspect.is_abstract) continue;
      for (const auto& pc : aspect.named) {
        MatchOutcome out = m.eval(pc.expr, aspect.pointcut_context(pc), point);
        bool fired = out.matched;
        keep(aspect.pointcut_label(pc), shadow, std::move(out));
        if (fired) record(TraceEvent::pointcut_fired(aspect.name, pc.name, shadow));
      }
    }
    std::vector<Matched> arounds, befores, afters;
    for (const auto& ref : rt_.advice_order()) {
      const AspectDef& aspect = aspects[ref.aspect];
      const AdviceDef& adv = aspect.advice[ref.index];
      MatchOutcome out = m.eval(adv.pointcut, aspect.advice_context(ref.index), point);
      if (out.matched) {
        Matched hit{ref, out.bindings};
        switch (adv.kind) {
          case AdviceKind::kAround: arounds.push_back(std::move(hit)); break;
          case AdviceKind::kBefore: befores.push_back(std::move(hit)); break;
          default: afters.push_back(std::move(hit)); break;
        }
      }
      keep(aspect.advice_label(ref.index), shadow, std::move(out));
    }

    std::function<void(std::size_t)> chain = [&](std::size_t k) {
      if (k < arounds.size()) {
        std::function<void()> proceed = [&chain, k] { chain(k + 1); };
        run_advice(arounds[k], shadow, self, &proceed);
        return;
      }
      for (const auto& b : befores) run_advice(b, shadow, self, nullptr);
      record(TraceEvent::enter(shadow, self ? self->to_string() : ""));
      body();
      record(TraceEvent::exit(shadow));
      for (auto it = afters.rbegin(); it != afters.rend(); ++it) run_advice(*it, shadow, self, nullptr);
    };
    chain(0);
    stack_.pop_back();
    jp_stack_.pop_back();
  }

  void keep(const std::string& label, int shadow, MatchOutcome out) {
    if (!opt_.keep_logs) return;
    log_.evaluations.push_back({label, shadow, static_cast<int>(log_.trace.size()), std::move(out)});
  }

  void run_advice(const Matched& hit, int shadow, const std::optional<RuntimeObject>& self,
                  const std::function<void()>* proceed) {
    const AspectDef& aspect = rt_.aspects()[hit.ref.aspect];
    const AdviceDef& adv = aspect.advice[hit.ref.index];
    record(TraceEvent::advice_fired(aspect.name, static_cast<int>(hit.ref.index), adv.kind, shadow));
    Frame frame;
    frame.self = self;
    frame.bindings = &hit.bindings;
    frame.branch_owner = aspect.advice_label(hit.ref.index);
    frame.proceed = proceed;
    exec_body(adv.body, frame);
  }

  void execute_method(const DispatchTarget& d, const RuntimeObject& self) {
    if (++frames_ > opt_.max_frames) {
      throw Error(ErrorCode::kStackLimit, "recursion deeper than " + std::to_string(opt_.max_frames) + " frames");
    }
    auto shadow = rt_.shadows().execution_of(d.method);
    if (!shadow) throw Error(ErrorCode::kNoSuchMethod, "no execution shadow for " + d.declaring_type);
    const MethodDecl* method = d.method;
    std::string declaring = d.declaring_type;
    join_point(*shadow, self, self, [&] {
      Frame frame;
      frame.self = self;
      frame.declaring_type = declaring;
      if (method->introduced_by) {
        frame.branch_owner = declaring + "." + method->name + "/" + std::to_string(method->arity());
      }
      exec_body(method->body, frame);
    });
    --frames_;
  }

  RuntimeObject lookup(const Frame& frame, const std::string& var) {
    if (auto it = frame.locals.find(var); it != frame.locals.end()) return it->second;
    if (frame.bindings) {
      if (auto it = frame.bindings->find(var); it != frame.bindings->end()) return it->second;
    }
    if (auto it = env_.find(var); it != env_.end()) return it->second;
    throw Error(ErrorCode::kRuntimeBinding, "unbound variable '" + var + "'");
  }

  void exec_body(const Body& body, Frame& frame) {
    for (const auto& s : body) exec(s, frame);
  }

  void call_through(const std::optional<int>& shadow, const Frame& frame, const RuntimeObject& receiver,
                    const std::function<DispatchTarget()>& resolve) {
    auto dispatch = [&] {
      DispatchTarget d = resolve();
      if (shadow && opt_.keep_logs) {
        log_.dispatches.push_back({*shadow, receiver.class_name,
                                   d.declaring_type + "." + d.method->name + "/" + std::to_string(d.method->arity()),
                                   static_cast<int>(log_.trace.size())});
      }
      execute_method(d, receiver);
    };
    if (shadow) {
      join_point(*shadow, frame.self, receiver, dispatch);
    } else {
      dispatch();
    }
  }

  void exec(const Stmt& s, Frame& frame) {
    switch (s.kind) {
      case Stmt::Kind::kEmit: record(TraceEvent::emit(s.label)); return;
      case Stmt::Kind::kNew: frame.locals[s.variable] = create(s.type_name); return;
      case Stmt::Kind::kProceed:
        if (frame.proceed) (*frame.proceed)();
        return;
      case Stmt::Kind::kIfType: {
        RuntimeObject obj = lookup(frame, s.variable);
        std::string type = rt_.model().resolve(s.type_name).value_or(s.type_name);
        bool taken = is_subtype(rt_.model(), obj.class_name, type);
        if (!frame.branch_owner.empty() && opt_.keep_logs) {
          log_.branches.push_back({frame.branch_owner, s.ordinal, taken, static_cast<int>(log_.trace.size())});
        }
        exec_body(taken ? s.then_body : s.else_body, frame);
        return;
      }
      case Stmt::Kind::kCall: {
        RuntimeObject receiver;
        switch (s.receiver.kind) {
          case Receiver::Kind::kThis:
            if (!frame.self) throw Error(ErrorCode::kRuntimeBinding, "no 'this' object for call");
            receiver = *frame.self;
            break;
          case Receiver::Kind::kNew: receiver = create(s.receiver.name); break;
          case Receiver::Kind::kVariable: receiver = lookup(frame, s.receiver.name); break;
        }
        call_through(rt_.shadows().call_at(&s), frame, receiver, [&] {
          return resolve_dispatch(rt_.model(), receiver.class_name, s.method, s.arg_count);
        });
        return;
      }
      case Stmt::Kind::kSuperCall: {
        const TypeDecl* decl = rt_.model().find(frame.declaring_type);
        if (decl == nullptr || !decl->extends || !frame.self) {
          throw Error(ErrorCode::kNoSuchMethod, "supercall " + s.method + " has no superclass");
        }
        std::string super = *decl->extends;
        call_through(rt_.shadows().call_at(&s), frame, *frame.self,
                     [&] { return resolve_dispatch(rt_.model(), super, s.method); });
        return;
      }
    }
  }

  const Runtime& rt_;
  const ExecOptions& opt_;
  RunLog& log_;
  Objects env_;
  int serial_ = 0;
  int next_jp_ = 0;
  int frames_ = 0;
  std::vector<int> stack_;
  std::vector<int> jp_stack_;
};

struct ThreadJob {
  std::function<void()> fn;
};

void* thread_entry(void* arg) {
  static_cast<ThreadJob*>(arg)->fn();
  return nullptr;
}

// Deep scenario recursion needs far more than the default thread stack.
void run_on_large_stack(const std::function<void()>& fn) {
  constexpr std::size_t kStack = 512u * 1024u * 1024u;
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStack);
  ThreadJob job{fn};
  pthread_t thread;
  if (pthread_create(&thread, &attr, thread_entry, &job) != 0) {
    pthread_attr_destroy(&attr);
    fn();
    return;
  }
  pthread_join(thread, nullptr);
  pthread_attr_destroy(&attr);
}

}  // namespace

RunLog Runtime::execute(const Scenario& scenario, const ExecOptions& options) const {
  RunLog log;
  log.scenario = scenario.name;
  log.model_hash = hash_;
  run_on_large_stack([&] {
    Execution ex(*this, options, log);
    try {
      ex.run(scenario);
    } catch (const Error& e) {
      log.error = e.what();
      log.error_code = e.code();
    }
  });
  return log;
}

}  // namespace aspectlab
