//! Labeled transition systems, finite paths and the lock vocabulary.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::hash::Hash;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Dense state identifier, `0..num_states`.
pub type StateId = usize;
/// Index into [`Lts::actions`].
pub type ActionId = usize;
/// Index into [`Lts::props`].
pub type PropId = usize;

/// Labeling of a single state as a bitset over the LTS's proposition index.
pub type PropSet = FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    /// A step the process performs itself.
    Internal,
    /// A step of the environment (`ch_l`, `ch_g`), drawn dashed in pictures.
    Env,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub name: String,
    pub kind: ActionKind,
}

impl Action {
    pub fn internal(name: impl Into<String>) -> Self {
        Action { name: name.into(), kind: ActionKind::Internal }
    }

    pub fn env(name: impl Into<String>) -> Self {
        Action { name: name.into(), kind: ActionKind::Env }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("the LTS has no initial state")]
    NoInitialState,
    #[error("state {0} has no successor")]
    NotSerial(StateId),
    #[error("path has {states} states but {actions} actions")]
    PathShape { states: usize, actions: usize },
}

/// A finite labeled transition system `<S, Act, ->, I, AP, L>`.
///
/// States are `0..num_states`. Transitions are kept sorted, and the
/// successor lists are ordered by `(action, target)`, so every enumeration
/// over an `Lts` is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    num_states: usize,
    props: Vec<String>,
    actions: Vec<Action>,
    transitions: Vec<(StateId, ActionId, StateId)>,
    initials: Vec<StateId>,
    labels: Vec<PropSet>,
    out: Vec<Vec<(ActionId, StateId)>>,
}

/// Incremental construction of an [`Lts`].
#[derive(Clone, Debug)]
pub struct LtsBuilder {
    num_states: usize,
    props: Vec<String>,
    actions: Vec<Action>,
    transitions: BTreeSet<(StateId, ActionId, StateId)>,
    initials: BTreeSet<StateId>,
    labels: Vec<PropSet>,
    error: Option<LtsError>,
}

impl LtsBuilder {
    pub fn new(num_states: usize, props: Vec<String>, actions: Vec<Action>) -> Self {
        let mut error = None;
        for (i, p) in props.iter().enumerate() {
            if props[..i].contains(p) {
                error = Some(LtsError::DuplicateName(p.clone()));
            }
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].iter().any(|b| b.name == a.name) {
                error = Some(LtsError::DuplicateName(a.name.clone()));
            }
        }
        let labels = vec![FixedBitSet::with_capacity(props.len()); num_states];
        LtsBuilder {
            num_states,
            props,
            actions,
            transitions: BTreeSet::new(),
            initials: BTreeSet::new(),
            labels,
            error,
        }
    }

    fn fail(&mut self, e: LtsError) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn check_state(&mut self, s: StateId) -> bool {
        if s >= self.num_states {
            self.fail(LtsError::UnknownState(s));
            false
        } else {
            true
        }
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        if self.check_state(s) {
            self.initials.insert(s);
        }
        self
    }

    pub fn label(&mut self, s: StateId, prop: &str) -> &mut Self {
        match self.props.iter().position(|p| p == prop) {
            Some(p) => self.label_id(s, p),
            None => {
                self.fail(LtsError::UnknownProp(prop.to_string()));
                self
            }
        }
    }

    pub fn label_id(&mut self, s: StateId, p: PropId) -> &mut Self {
        if self.check_state(s) {
            if p < self.props.len() {
                self.labels[s].insert(p);
            } else {
                self.fail(LtsError::UnknownProp(format!("#{p}")));
            }
        }
        self
    }

    pub fn transition(&mut self, s: StateId, action: &str, t: StateId) -> &mut Self {
        match self.actions.iter().position(|a| a.name == action) {
            Some(a) => self.transition_id(s, a, t),
            None => {
                self.fail(LtsError::UnknownAction(action.to_string()));
                self
            }
        }
    }

    pub fn transition_id(&mut self, s: StateId, a: ActionId, t: StateId) -> &mut Self {
        if self.check_state(s) && self.check_state(t) {
            if a < self.actions.len() {
                self.transitions.insert((s, a, t));
            } else {
                self.fail(LtsError::UnknownAction(format!("#{a}")));
            }
        }
        self
    }

    /// Builds the LTS, checking identifiers only.
    pub fn build(&self) -> Result<Lts, LtsError> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        let transitions: Vec<_> = self.transitions.iter().copied().collect();
        let mut out = vec![Vec::new(); self.num_states];
        for &(s, a, t) in &transitions {
            out[s].push((a, t));
        }
        Ok(Lts {
            num_states: self.num_states,
            props: self.props.clone(),
            actions: self.actions.clone(),
            transitions,
            initials: self.initials.iter().copied().collect(),
            labels: self.labels.clone(),
            out,
        })
    }

    /// Builds the LTS and additionally requires a nonempty initial set and
    /// that every state has a successor.
    pub fn build_serial(&self) -> Result<Lts, LtsError> {
        let lts = self.build()?;
        lts.validate(true)?;
        Ok(lts)
    }
}

impl Lts {
    pub fn builder(num_states: usize, props: Vec<String>, actions: Vec<Action>) -> LtsBuilder {
        LtsBuilder::new(num_states, props, actions)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn states(&self) -> core::ops::Range<StateId> {
        0..self.num_states
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn transitions(&self) -> &[(StateId, ActionId, StateId)] {
        &self.transitions
    }

    pub fn initials(&self) -> &[StateId] {
        &self.initials
    }

    pub fn is_initial(&self, s: StateId) -> bool {
        self.initials.binary_search(&s).is_ok()
    }

    pub fn labels(&self) -> &[PropSet] {
        &self.labels
    }

    pub fn label(&self, s: StateId) -> &PropSet {
        &self.labels[s]
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.props.iter().position(|p| p == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn holds(&self, s: StateId, p: PropId) -> bool {
        self.labels[s].contains(p)
    }

    pub fn has_transition(&self, s: StateId, a: ActionId, t: StateId) -> bool {
        s < self.num_states && self.out[s].binary_search(&(a, t)).is_ok()
    }

    /// Outgoing transitions of `s`, ordered by `(action, target)`.
    pub fn successors(&self, s: StateId) -> Result<&[(ActionId, StateId)], LtsError> {
        self.out.get(s).map(Vec::as_slice).ok_or(LtsError::UnknownState(s))
    }

    /// Names of the propositions labeling `s`, in index order.
    pub fn label_names(&self, s: StateId) -> Vec<&str> {
        self.labels[s].ones().map(|p| self.props[p].as_str()).collect()
    }

    pub fn is_serial(&self) -> bool {
        self.out.iter().all(|o| !o.is_empty())
    }

    pub fn validate(&self, serial: bool) -> Result<(), LtsError> {
        if self.initials.is_empty() {
            return Err(LtsError::NoInitialState);
        }
        if serial {
            if let Some(s) = self.out.iter().position(Vec::is_empty) {
                return Err(LtsError::NotSerial(s));
            }
        }
        Ok(())
    }

    /// States reachable from the initial states (least fixpoint of `Post`).
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in &self.initials {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.out[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        (0..self.num_states).filter(|&s| seen[s]).collect()
    }

    /// Sub-LTS induced by the reachable states, renumbered in ascending order.
    pub fn restrict_to_reachable(&self) -> Lts {
        let keep = self.reachable();
        let mut index = vec![usize::MAX; self.num_states];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let mut b = LtsBuilder::new(keep.len(), self.props.clone(), self.actions.clone());
        for (new, &old) in keep.iter().enumerate() {
            b.labels[new] = self.labels[old].clone();
            if self.is_initial(old) {
                b.initial(new);
            }
        }
        for &(s, a, t) in &self.transitions {
            if index[s] != usize::MAX {
                b.transition_id(index[s], a, index[t]);
            }
        }
        b.build().expect("restriction keeps identifiers valid")
    }

    /// Converts back into a builder, e.g. to delete or add edges in tests.
    pub fn to_builder(&self) -> LtsBuilder {
        let mut b = LtsBuilder::new(self.num_states, self.props.clone(), self.actions.clone());
        b.labels = self.labels.clone();
        b.initials = self.initials.iter().copied().collect();
        b.transitions = self.transitions.iter().copied().collect();
        b
    }

    /// Removes a transition; unknown triples are ignored.
    pub fn without_transition(&self, s: StateId, a: ActionId, t: StateId) -> Lts {
        let mut b = self.to_builder();
        b.transitions.remove(&(s, a, t));
        b.build().expect("valid identifiers")
    }
}

/// A finite path `s_0 a_0 s_1 ... s_m`.
///
/// An action of `None` is a stutter step (`s_i = s_{i+1}` without the host
/// taking a transition); these arise when product paths are projected onto a
/// component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePath {
    states: Vec<StateId>,
    actions: Vec<Option<ActionId>>,
}

impl FinitePath {
    pub fn new(states: Vec<StateId>, actions: Vec<Option<ActionId>>) -> Result<Self, LtsError> {
        if states.is_empty() || actions.len() + 1 != states.len() {
            return Err(LtsError::PathShape { states: states.len(), actions: actions.len() });
        }
        Ok(FinitePath { states, actions })
    }

    /// Path whose every step is a real transition.
    pub fn from_steps(start: StateId, steps: &[(ActionId, StateId)]) -> Self {
        let mut states = vec![start];
        let mut actions = Vec::with_capacity(steps.len());
        for &(a, t) in steps {
            actions.push(Some(a));
            states.push(t);
        }
        FinitePath { states, actions }
    }

    pub fn single(s: StateId) -> Self {
        FinitePath { states: vec![s], actions: Vec::new() }
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn actions(&self) -> &[Option<ActionId>] {
        &self.actions
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn prefix(&self, steps: usize) -> FinitePath {
        let steps = steps.min(self.len());
        FinitePath {
            states: self.states[..=steps].to_vec(),
            actions: self.actions[..steps].to_vec(),
        }
    }

    /// True when no step changes the state.
    pub fn is_all_stutter(&self) -> bool {
        self.states.windows(2).all(|w| w[0] == w[1])
    }
}

/// Checks that every step of `p` is a transition of `lts` (stutter steps must
/// keep the state). Unknown identifiers yield `false`.
pub fn is_path(lts: &Lts, p: &FinitePath) -> bool {
    if p.states.iter().any(|&s| s >= lts.num_states()) {
        return false;
    }
    p.states.windows(2).zip(&p.actions).all(|(w, a)| match a {
        Some(a) => lts.has_transition(w[0], *a, w[1]),
        None => w[0] == w[1],
    })
}

/// Collapses maximal runs of equal consecutive label sets.
pub fn destutter<T: PartialEq + Clone>(labels: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(labels.len());
    for l in labels {
        if out.last() != Some(l) {
            out.push(l.clone());
        }
    }
    out
}

/// A finite system whose states can be explored on the fly.
pub trait TransitionSystem {
    type State: Clone + Eq + Hash + Ord + fmt::Debug;
    type Action: Clone + PartialEq + fmt::Debug;

    fn initial_states(&self) -> Vec<Self::State>;
    /// Successors in a deterministic order.
    fn successors(&self, s: &Self::State) -> Vec<(Self::Action, Self::State)>;
    fn prop_names(&self) -> &[String];
    fn label(&self, s: &Self::State) -> PropSet;
}

impl TransitionSystem for Lts {
    type State = StateId;
    type Action = ActionId;

    fn initial_states(&self) -> Vec<StateId> {
        self.initials.clone()
    }

    fn successors(&self, s: &StateId) -> Vec<(ActionId, StateId)> {
        self.out[*s].clone()
    }

    fn prop_names(&self) -> &[String] {
        &self.props
    }

    fn label(&self, s: &StateId) -> PropSet {
        self.labels[*s].clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("name `{0}` is declared more than once")]
    Duplicate(String),
    #[error("name `{0}` is reserved (prefix av_, own_ or ch_, a keyword, or not an identifier)")]
    Reserved(String),
}

/// Per-process vocabulary: user shared variables, locals, locks and internal
/// actions, plus the lock/environment names derived from them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vocabulary {
    shared: Vec<String>,
    locals: Vec<String>,
    locks: Vec<String>,
    actions: Vec<String>,
}

const RESERVED_PREFIXES: [&str; 3] = ["av_", "own_", "ch_"];

impl Vocabulary {
    pub fn new(
        shared: Vec<String>,
        locals: Vec<String>,
        locks: Vec<String>,
        actions: Vec<String>,
    ) -> Result<Self, VocabError> {
        let mut seen: Vec<&String> = Vec::new();
        for name in shared.iter().chain(&locals).chain(&locks).chain(&actions) {
            if RESERVED_PREFIXES.iter().any(|p| name.starts_with(p))
                || !crate::syntax::is_plain_name(name)
                || crate::logic::FORMULA_KEYWORDS.contains(&name.as_str())
                || crate::ltl::is_operator_run(name)
            {
                return Err(VocabError::Reserved(name.clone()));
            }
            if seen.contains(&name) {
                return Err(VocabError::Duplicate(name.clone()));
            }
            seen.push(name);
        }
        Ok(Vocabulary { shared, locals, locks, actions })
    }

    /// Convenience constructor from string slices; panics on invalid names.
    pub fn from_strs(shared: &[&str], locals: &[&str], locks: &[&str], actions: &[&str]) -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Vocabulary::new(v(shared), v(locals), v(locks), v(actions)).expect("valid vocabulary")
    }

    pub fn av(lock: &str) -> String {
        format!("av_{lock}")
    }

    pub fn own(lock: &str) -> String {
        format!("own_{lock}")
    }

    pub fn ch(var: &str) -> String {
        format!("ch_{var}")
    }

    /// User-declared shared variables (not including `av_l`).
    pub fn shared(&self) -> &[String] {
        &self.shared
    }

    /// User-declared locals (not including `own_l`).
    pub fn locals(&self) -> &[String] {
        &self.locals
    }

    pub fn locks(&self) -> &[String] {
        &self.locks
    }

    /// Internal actions.
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    /// `Sh`: user shared variables followed by `av_l` for each lock.
    pub fn shared_props(&self) -> Vec<String> {
        let mut v = self.shared.clone();
        v.extend(self.locks.iter().map(|l| Self::av(l)));
        v
    }

    /// `Loc`: user locals followed by `own_l` for each lock.
    pub fn local_props(&self) -> Vec<String> {
        let mut v = self.locals.clone();
        v.extend(self.locks.iter().map(|l| Self::own(l)));
        v
    }

    /// All propositions, shared first.
    pub fn props(&self) -> Vec<String> {
        let mut v = self.shared_props();
        v.extend(self.local_props());
        v
    }

    /// Environment actions: `ch_l` per lock, then `ch_g` per shared variable.
    pub fn env_actions(&self) -> Vec<String> {
        self.locks.iter().chain(&self.shared).map(|x| Self::ch(x)).collect()
    }

    /// Internal actions followed by environment actions.
    pub fn all_actions(&self) -> Vec<Action> {
        let mut v: Vec<Action> = self.actions.iter().map(|a| Action::internal(a.clone())).collect();
        v.extend(self.env_actions().into_iter().map(Action::env));
        v
    }

    pub fn is_shared_prop(&self, p: &str) -> bool {
        self.shared.iter().any(|g| g == p) || self.locks.iter().any(|l| Self::av(l) == p)
    }

    /// The environment action that changes shared proposition `p`:
    /// `ch_g` for a user shared variable, `ch_l` for `av_l`.
    pub fn env_action_for(&self, p: &str) -> Option<String> {
        if self.shared.iter().any(|g| g == p) {
            return Some(Self::ch(p));
        }
        self.locks.iter().find(|l| Self::av(l) == p).map(|l| Self::ch(l))
    }

    pub fn builder(&self, num_states: usize) -> LtsBuilder {
        LtsBuilder::new(num_states, self.props(), self.all_actions())
    }

    /// True if `lts` has exactly this vocabulary's propositions and actions.
    pub fn matches(&self, lts: &Lts) -> bool {
        lts.props() == self.props().as_slice() && lts.actions() == self.all_actions().as_slice()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyncCondition {
    /// `own_l => !av_l`
    A,
    /// `!own_l <=> exists ch_l step`
    B,
    /// `ch_l` flips `av_l`
    C,
    /// `ch_l` keeps everything except `own_l`, `av_l`
    D,
    /// every state has `ch_g` steps to `g` and to `!g`
    E,
    /// `ch_g` keeps everything except `g`
    F,
}

impl fmt::Display for SyncCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            SyncCondition::A => "a",
            SyncCondition::B => "b",
            SyncCondition::C => "c",
            SyncCondition::D => "d",
            SyncCondition::E => "e",
            SyncCondition::F => "f",
        };
        f.write_str(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyncViolation {
    pub condition: SyncCondition,
    /// Lock or shared variable the violated instance is about.
    pub subject: String,
    /// Witnessing states (one state, or the two endpoints of a transition).
    pub states: Vec<StateId>,
}

impl fmt::Display for SyncViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) for `{}` at states {:?}", self.condition, self.subject, self.states)
    }
}

/// Checks the six lock/shared-variable conditions semantically on `lts` by
/// direct expansion over states and transitions.
pub fn check_sync_conditions(lts: &Lts, v: &Vocabulary) -> Result<Vec<SyncViolation>, LtsError> {
    let prop = |name: &str| lts.prop_id(name).ok_or_else(|| LtsError::UnknownProp(name.to_string()));
    let action = |name: &str| lts.action_id(name).ok_or_else(|| LtsError::UnknownAction(name.to_string()));
    let all_props: Vec<PropId> = v.props().iter().map(|p| prop(p)).collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    let mut push = |condition, subject: &str, states: Vec<StateId>| {
        out.push(SyncViolation { condition, subject: subject.to_string(), states })
    };
    let frames = |s: StateId, t: StateId, except: &[PropId]| {
        all_props
            .iter()
            .filter(|p| !except.contains(p))
            .all(|&p| lts.holds(s, p) == lts.holds(t, p))
    };

    for l in v.locks() {
        let own = prop(&Vocabulary::own(l))?;
        let av = prop(&Vocabulary::av(l))?;
        let ch = action(&Vocabulary::ch(l))?;
        for s in lts.states() {
            if lts.holds(s, own) && lts.holds(s, av) {
                push(SyncCondition::A, l, vec![s]);
            }
            let has_ch = lts.out[s].iter().any(|&(a, _)| a == ch);
            if !lts.holds(s, own) != has_ch {
                push(SyncCondition::B, l, vec![s]);
            }
        }
        for &(s, a, t) in lts.transitions() {
            if a != ch {
                continue;
            }
            if lts.holds(s, av) == lts.holds(t, av) {
                push(SyncCondition::C, l, vec![s, t]);
            }
            if !frames(s, t, &[own, av]) {
                push(SyncCondition::D, l, vec![s, t]);
            }
        }
    }
    for g in v.shared() {
        let gp = prop(g)?;
        let ch = action(&Vocabulary::ch(g))?;
        for s in lts.states() {
            let targets = lts.out[s].iter().filter(|&&(a, _)| a == ch).map(|&(_, t)| t);
            let (mut to_true, mut to_false) = (false, false);
            for t in targets {
                if lts.holds(t, gp) {
                    to_true = true;
                } else {
                    to_false = true;
                }
            }
            if !(to_true && to_false) {
                push(SyncCondition::E, g, vec![s]);
            }
        }
    }
    // (f) ranges over every shared proposition; for av_l the changing action is ch_l.
    for g in v.shared_props() {
        let gp = prop(&g)?;
        let ch = action(&v.env_action_for(&g).expect("shared prop"))?;
        for &(s, a, t) in lts.transitions() {
            if a == ch && !frames(s, t, &[gp]) {
                push(SyncCondition::F, &g, vec![s, t]);
            }
        }
    }
    Ok(out)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_lts(rng: &mut ChaCha8Rng, n: usize) -> Lts {
        let props = vec!["p".to_string(), "q".to_string()];
        let actions = vec![Action::internal("a"), Action::env("b")];
        let mut b = Lts::builder(n, props, actions);
        for s in 0..n {
            for p in 0..2 {
                if rng.gen_bool(0.5) {
                    b.label_id(s, p);
                }
            }
            for a in 0..2 {
                for t in 0..n {
                    if rng.gen_bool(0.3) {
                        b.transition_id(s, a, t);
                    }
                }
            }
        }
        b.initial(rng.gen_range(0..n));
        b.build().unwrap()
    }

    #[test]
    fn successors_of_mutex_try_state() {
        let lts = mutex_lts();
        let get_lock = lts.action_id("getLock").unwrap();
        let ch = lts.action_id("ch_m").unwrap();
        assert_eq!(lts.successors(3).unwrap(), &[(get_lock, 1), (ch, 4)]);
        assert!(matches!(lts.successors(9), Err(LtsError::UnknownState(9))));
    }

    #[test]
    fn successors_of_self_loop() {
        let mut b = Lts::builder(1, vec![], vec![Action::internal("a")]);
        b.initial(0).transition(0, "a", 0);
        let lts = b.build_serial().unwrap();
        assert_eq!(lts.successors(0).unwrap(), &[(0, 0)]);
    }

    #[test]
    fn successors_match_transition_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let lts = random_lts(&mut rng, 4);
            for s in lts.states() {
                let mut expected: Vec<_> = lts
                    .transitions()
                    .iter()
                    .filter(|t| t.0 == s)
                    .map(|&(_, a, t)| (a, t))
                    .collect();
                expected.sort();
                assert_eq!(lts.successors(s).unwrap(), expected.as_slice());
            }
        }
    }

    #[test]
    fn mutex_paths() {
        let lts = mutex_lts();
        let t = lts.action_id("enterTry").unwrap();
        let g = lts.action_id("getLock").unwrap();
        assert!(is_path(&lts, &FinitePath::from_steps(5, &[(t, 3), (g, 1)])));
        assert!(!is_path(&lts, &FinitePath::from_steps(5, &[(g, 3)])));
        assert!(is_path(&lts, &FinitePath::single(2)));
        assert!(!is_path(&lts, &FinitePath::single(17)));
    }

    fn enumerate_paths(lts: &Lts, max_len: usize) -> Vec<FinitePath> {
        let mut out: Vec<FinitePath> = lts.states().map(FinitePath::single).collect();
        let mut frontier = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                let last = *p.states().last().unwrap();
                for &(s, a, t) in lts.transitions() {
                    if s == last {
                        let mut states = p.states().to_vec();
                        let mut actions = p.actions().to_vec();
                        states.push(t);
                        actions.push(Some(a));
                        next.push(FinitePath::new(states, actions).unwrap());
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn is_path_agrees_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let lts = random_lts(&mut rng, 3);
            let all = enumerate_paths(&lts, 3);
            for p in &all {
                assert!(is_path(&lts, p));
            }
            for _ in 0..200 {
                let len = rng.gen_range(0..=3);
                let states: Vec<_> = (0..=len).map(|_| rng.gen_range(0..3)).collect();
                let actions: Vec<_> = (0..len).map(|_| Some(rng.gen_range(0..2))).collect();
                let p = FinitePath::new(states, actions).unwrap();
                assert_eq!(is_path(&lts, &p), all.contains(&p));
            }
        }
    }

    #[test]
    fn destutter_examples() {
        let set = |xs: &[usize]| {
            let mut s = FixedBitSet::with_capacity(2);
            xs.iter().for_each(|&x| s.insert(x));
            s
        };
        let (p, q) = (set(&[0]), set(&[1]));
        let input = vec![p.clone(), p.clone(), q.clone(), q.clone(), p.clone()];
        assert_eq!(destutter(&input), vec![p.clone(), q, p.clone()]);
        assert_eq!(destutter(&[p.clone(), p.clone(), p.clone()]), vec![p]);
    }

    #[test]
    fn reachable_examples() {
        let mut b = Lts::builder(2, vec![], vec![Action::internal("a")]);
        b.initial(0).transition(1, "a", 0);
        assert_eq!(b.build().unwrap().reachable(), vec![0]);

        let mut b = Lts::builder(3, vec![], vec![Action::internal("a")]);
        b.initial(0);
        for s in 0..3 {
            for t in 0..3 {
                b.transition(s, "a", t);
            }
        }
        assert_eq!(b.build().unwrap().reachable(), vec![0, 1, 2]);
    }

    #[test]
    fn sync_conditions_hold_on_mutex() {
        let lts = mutex_lts();
        assert_eq!(check_sync_conditions(&lts, &mutex_vocab()).unwrap(), vec![]);
    }

    #[test]
    fn deleting_ch_edge_violates_b() {
        let lts = mutex_lts();
        let ch = lts.action_id("ch_m").unwrap();
        let broken = lts.without_transition(3, ch, 4);
        let violations = check_sync_conditions(&broken, &mutex_vocab()).unwrap();
        assert_eq!(
            violations,
            vec![SyncViolation { condition: SyncCondition::B, subject: "m".into(), states: vec![3] }]
        );
    }

    #[test]
    fn own_and_av_together_violates_a() {
        let mut b = mutex_lts().to_builder();
        b.label(0, "av_m");
        let violations = check_sync_conditions(&b.build().unwrap(), &mutex_vocab()).unwrap();
        assert!(violations.iter().any(|v| v.condition == SyncCondition::A && v.states == vec![0]));
    }

    #[test]
    fn missing_derived_props_is_an_error() {
        let v = mutex_vocab();
        let mut b = Lts::builder(1, vec!["ncs".into()], vec![]);
        b.initial(0);
        assert!(check_sync_conditions(&b.build().unwrap(), &v).is_err());
    }

    #[test]
    fn vocabulary_rejects_reserved_and_duplicates() {
        let s = |x: &str| vec![x.to_string()];
        assert!(matches!(
            Vocabulary::new(s("av_x"), vec![], vec![], vec![]),
            Err(VocabError::Reserved(_))
        ));
        assert!(matches!(
            Vocabulary::new(s("x"), s("x"), vec![], vec![]),
            Err(VocabError::Duplicate(_))
        ));
        let v = Vocabulary::from_strs(&["g"], &["p"], &["m"], &["go"]);
        assert_eq!(v.props(), vec!["g", "av_m", "p", "own_m"]);
        assert_eq!(v.env_actions(), vec!["ch_m", "ch_g"]);
        assert_eq!(v.env_action_for("av_m").as_deref(), Some("ch_m"));
    }

    proptest::proptest! {
        #[test]
        fn destutter_is_idempotent(xs in proptest::collection::vec(0u8..3, 1..20)) {
            let once = destutter(&xs);
            proptest::prop_assert_eq!(destutter(&once), once);
        }

        #[test]
        fn path_prefixes_are_paths(seed in 0u64..500, len in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lts = random_lts(&mut rng, 3);
            let start = rng.gen_range(0..3);
            let mut s = start;
            let mut steps = Vec::new();
            for _ in 0..len {
                let succ = lts.successors(s).unwrap();
                if succ.is_empty() { break; }
                let (a, t) = succ[rng.gen_range(0..succ.len())];
                steps.push((a, t));
                s = t;
            }
            let path = FinitePath::from_steps(start, &steps);
            proptest::prop_assert!(is_path(&lts, &path));
            for k in 0..=path.len() {
                proptest::prop_assert!(is_path(&lts, &path.prefix(k)));
            }
        }

        #[test]
        fn reachable_contains_initials(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lts = random_lts(&mut rng, 4);
            let r = lts.reachable();
            for s in lts.initials() {
                proptest::prop_assert!(r.contains(s));
            }
            proptest::prop_assert!(r.iter().all(|&s| s < lts.num_states()));
        }
    }
}
