//! Stress numbering over binary bracketings and its inverses.
//!
//! Three forward algorithms map a bracketed phrase to a vector of stress
//! indices (1 = strongest):
//!
//! - [`stress_subordinate`]: cyclic reduction of innermost brackets,
//! - [`metrical_number`]: w/s labelling of a metrical tree and path counting,
//! - [`parenthesis_count`]: a single left-to-right pass with a depth counter.
//!
//! Two inverse algorithms go back from numbers to structure:
//!
//! - [`parse_numbers_to_tree`]: shift-reduce parse into a [`NumberTree`],
//! - [`numbers_to_bracketing`]: direct generation of a parenthesis string.
//!
//! All algorithms support the nuclear stress rule (right constituent strong).
//! The forward algorithms additionally support the compound stress rule (left
//! constituent strong) through [`StressRule::Compound`].

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StressError {
    #[error("malformed bracketing: {0}")]
    MalformedBracketing(String),
    #[error("number sequence {0:?} is not derivable from any binary bracketing")]
    Unparseable(Vec<u32>),
}

impl StressError {
    pub fn name(&self) -> &'static str {
        match self {
            StressError::MalformedBracketing(_) => "MalformedBracketing",
            StressError::Unparseable(_) => "Unparseable",
        }
    }
}

/// Which daughter of a binary constituent keeps the stronger stress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StressRule {
    /// Right-hand constituent is strong.
    #[default]
    Nuclear,
    /// Left-hand constituent is strong.
    Compound,
}

impl FromStr for StressRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nuclear" | "nsr" => Ok(StressRule::Nuclear),
            "compound" | "csr" => Ok(StressRule::Compound),
            other => Err(format!("unknown stress rule `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Left,
    Right,
    Terminal(String),
}

impl Token {
    fn mirrored(&self) -> Token {
        match self {
            Token::Left => Token::Right,
            Token::Right => Token::Left,
            Token::Terminal(t) => Token::Terminal(t.clone()),
        }
    }
}

/// A token sequence in a parenthesis language.
///
/// Construction does not validate: the inverse generator can legitimately
/// produce unbalanced strings. Forward algorithms validate through
/// [`Bracketing::to_tree`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bracketing {
    tokens: Vec<Token>,
}

impl Bracketing {
    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        Bracketing { tokens }
    }

    /// Tokenizes text. Whitespace separates terminals; `(` and `)` are
    /// tokens on their own whether or not they are surrounded by spaces.
    pub fn parse(text: &str) -> Self {
        let mut tokens = Vec::new();
        let mut word = String::new();
        let flush = |word: &mut String, tokens: &mut Vec<Token>| {
            if !word.is_empty() {
                tokens.push(Token::Terminal(std::mem::take(word)));
            }
        };
        for ch in text.chars() {
            match ch {
                '(' => {
                    flush(&mut word, &mut tokens);
                    tokens.push(Token::Left);
                }
                ')' => {
                    flush(&mut word, &mut tokens);
                    tokens.push(Token::Right);
                }
                c if c.is_whitespace() => flush(&mut word, &mut tokens),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut tokens);
        Bracketing { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn labels(&self) -> Vec<String> {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Token::Terminal(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    /// True when every prefix has at least as many left as right brackets
    /// and the totals agree.
    pub fn is_balanced(&self) -> bool {
        let mut depth = 0i64;
        for t in &self.tokens {
            match t {
                Token::Left => depth += 1,
                Token::Right => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                Token::Terminal(_) => {}
            }
        }
        depth == 0
    }

    /// Parses into a strictly binary tree.
    ///
    /// The only unary bracket accepted is one wrapping a lone terminal at the
    /// top level, as in `(dog)`.
    pub fn to_tree(&self) -> Result<Tree, StressError> {
        let mut pos = 0;
        let tree = parse_constituent(&self.tokens, &mut pos, true)?;
        if pos != self.tokens.len() {
            return Err(StressError::MalformedBracketing(
                "more than one top-level constituent".into(),
            ));
        }
        Ok(tree)
    }

    fn mirrored(&self) -> Bracketing {
        Bracketing {
            tokens: self.tokens.iter().rev().map(Token::mirrored).collect(),
        }
    }
}

/// Serialized as its canonical text.
impl Serialize for Bracketing {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Bracketing {
    /// Canonical rendering: no space after `(`, before `)` or between `)(`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut prev: Option<&Token> = None;
        for t in &self.tokens {
            let space = !matches!(
                (prev, t),
                (None, _)
                    | (Some(Token::Left), _)
                    | (Some(_), Token::Right)
                    | (Some(Token::Right), Token::Left)
            );
            if space {
                f.write_str(" ")?;
            }
            match t {
                Token::Left => f.write_str("(")?,
                Token::Right => f.write_str(")")?,
                Token::Terminal(s) => f.write_str(s)?,
            }
            prev = Some(t);
        }
        Ok(())
    }
}

fn parse_constituent(tokens: &[Token], pos: &mut usize, top: bool) -> Result<Tree, StressError> {
    match tokens.get(*pos) {
        None => Err(StressError::MalformedBracketing(
            "unexpected end of input".into(),
        )),
        Some(Token::Right) => Err(StressError::MalformedBracketing(format!(
            "unbalanced `)` at token {}",
            *pos
        ))),
        Some(Token::Terminal(label)) => {
            *pos += 1;
            Ok(Tree::Leaf(label.clone()))
        }
        Some(Token::Left) => {
            let open = *pos;
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => {
                        return Err(StressError::MalformedBracketing(format!(
                            "`(` at token {open} is never closed"
                        )))
                    }
                    Some(Token::Right) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(parse_constituent(tokens, pos, false)?),
                }
            }
            match children.len() {
                2 => {
                    let right = children.pop().unwrap();
                    let left = children.pop().unwrap();
                    Ok(Tree::Node(Box::new(left), Box::new(right)))
                }
                1 if top && matches!(children[0], Tree::Leaf(_)) => Ok(children.pop().unwrap()),
                0 => Err(StressError::MalformedBracketing(format!(
                    "empty brackets at token {open}"
                ))),
                n => Err(StressError::MalformedBracketing(format!(
                    "constituent at token {open} has {n} daughters, expected 2"
                ))),
            }
        }
    }
}

/// Binary constituent structure with labelled leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf(String),
    Node(Box<Tree>, Box<Tree>),
}

/// Label-free tree shape, used for structural comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Builds a labelled tree with leaves named `w1`, `w2`, ...
    pub fn to_tree(&self) -> Tree {
        fn go(s: &Shape, next: &mut usize) -> Tree {
            match s {
                Shape::Leaf => {
                    *next += 1;
                    Tree::Leaf(format!("w{next}"))
                }
                Shape::Node(l, r) => Tree::Node(Box::new(go(l, next)), Box::new(go(r, next))),
            }
        }
        go(self, &mut 0)
    }
}

impl Tree {
    pub fn shape(&self) -> Shape {
        match self {
            Tree::Leaf(_) => Shape::Leaf,
            Tree::Node(l, r) => Shape::Node(Box::new(l.shape()), Box::new(r.shape())),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<String>) {
        match self {
            Tree::Leaf(s) => out.push(s.clone()),
            Tree::Node(l, r) => {
                l.collect_labels(out);
                r.collect_labels(out);
            }
        }
    }

    pub fn to_bracketing(&self) -> Bracketing {
        fn emit(t: &Tree, out: &mut Vec<Token>) {
            match t {
                Tree::Leaf(s) => out.push(Token::Terminal(s.clone())),
                Tree::Node(l, r) => {
                    out.push(Token::Left);
                    emit(l, out);
                    emit(r, out);
                    out.push(Token::Right);
                }
            }
        }
        let mut tokens = Vec::new();
        emit(self, &mut tokens);
        Bracketing { tokens }
    }
}

/// Stress indices over terminals, 1 = most prominent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StressVector {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
    pub indices: Vec<u32>,
}

impl StressVector {
    pub fn new(indices: Vec<u32>) -> Self {
        StressVector {
            labels: None,
            indices,
        }
    }

    pub fn labelled(labels: Vec<String>, indices: Vec<u32>) -> Self {
        debug_assert_eq!(labels.len(), indices.len());
        StressVector {
            labels: Some(labels),
            indices,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Stress subordination: every terminal starts at 1; each cycle demotes
/// everything inside the innermost brackets except the strong daughter's
/// primary stress, then erases those brackets.
pub fn stress_subordinate(b: &Bracketing, rule: StressRule) -> Result<StressVector, StressError> {
    // structure check only; the cycles below run on the flat token string
    b.to_tree()?;

    enum Item {
        Left,
        Right,
        Word(usize),
    }
    let mut labels = Vec::new();
    let mut items: Vec<Item> = b
        .tokens
        .iter()
        .map(|t| match t {
            Token::Left => Item::Left,
            Token::Right => Item::Right,
            Token::Terminal(s) => {
                labels.push(s.clone());
                Item::Word(labels.len() - 1)
            }
        })
        .collect();
    let mut stress = vec![1u32; labels.len()];

    loop {
        // innermost pairs: `(` followed by words only, then `)`
        let mut innermost = Vec::new();
        let mut open: Option<usize> = None;
        for (i, it) in items.iter().enumerate() {
            match it {
                Item::Left => open = Some(i),
                Item::Right => {
                    if let Some(o) = open.take() {
                        innermost.push((o, i));
                    }
                }
                Item::Word(_) => {}
            }
        }
        if innermost.is_empty() {
            break;
        }
        for &(o, c) in &innermost {
            let words: Vec<usize> = items[o + 1..c]
                .iter()
                .filter_map(|it| match it {
                    Item::Word(w) => Some(*w),
                    _ => None,
                })
                .collect();
            let keep = match rule {
                StressRule::Nuclear => words.iter().rev().find(|&&w| stress[w] == 1),
                StressRule::Compound => words.iter().find(|&&w| stress[w] == 1),
            }
            .copied();
            for w in words {
                if Some(w) != keep {
                    stress[w] += 1;
                }
            }
        }
        let erase: std::collections::HashSet<usize> =
            innermost.iter().flat_map(|&(o, c)| [o, c]).collect();
        items = items
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !erase.contains(i))
            .map(|(_, it)| it)
            .collect();
    }
    Ok(StressVector::labelled(labels, stress))
}

/// Metrical tree: left daughters are `w` and right daughters `s` under the
/// nuclear rule (swapped for compounds). Leaves carry computed indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricalTree {
    Leaf {
        label: String,
        strength: Strength,
        index: u32,
    },
    Node {
        strength: Strength,
        left: Box<MetricalTree>,
        right: Box<MetricalTree>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Root,
    W,
    S,
}

impl MetricalTree {
    pub fn strength(&self) -> Strength {
        match self {
            MetricalTree::Leaf { strength, .. } | MetricalTree::Node { strength, .. } => *strength,
        }
    }

    pub fn leaf_indices(&self) -> Vec<u32> {
        self.leaves().into_iter().map(|(_, i)| i).collect()
    }

    pub fn leaves(&self) -> Vec<(String, u32)> {
        let mut out = Vec::new();
        fn go(t: &MetricalTree, out: &mut Vec<(String, u32)>) {
            match t {
                MetricalTree::Leaf { label, index, .. } => out.push((label.clone(), *index)),
                MetricalTree::Node { left, right, .. } => {
                    go(left, out);
                    go(right, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn to_stress_vector(&self) -> StressVector {
        let (labels, indices) = self.leaves().into_iter().unzip();
        StressVector::labelled(labels, indices)
    }
}

/// Labels branches w/s, then numbers each leaf by counting, from the lowest
/// `w` node on its path, that node and every node above it up to the root.
/// A leaf whose path carries no `w` gets 1.
pub fn metrical_number(b: &Bracketing, rule: StressRule) -> Result<MetricalTree, StressError> {
    let tree = b.to_tree()?;
    // lowest_w: depth of the lowest w node seen so far on the path from the root
    fn build(
        t: &Tree,
        strength: Strength,
        depth: u32,
        lowest_w: Option<u32>,
        rule: StressRule,
    ) -> MetricalTree {
        let lowest_w = if strength == Strength::W {
            Some(depth)
        } else {
            lowest_w
        };
        match t {
            Tree::Leaf(label) => MetricalTree::Leaf {
                label: label.clone(),
                strength,
                index: lowest_w.map_or(1, |d| d + 1),
            },
            Tree::Node(l, r) => {
                let (ls, rs) = match rule {
                    StressRule::Nuclear => (Strength::W, Strength::S),
                    StressRule::Compound => (Strength::S, Strength::W),
                };
                MetricalTree::Node {
                    strength,
                    left: Box::new(build(l, ls, depth + 1, lowest_w, rule)),
                    right: Box::new(build(r, rs, depth + 1, lowest_w, rule)),
                }
            }
        }
    }
    Ok(build(&tree, Strength::Root, 0, None, rule))
}

/// One pass over the token string with a depth counter and no stack.
///
/// A terminal directly after `(` takes the counter at once. Any other
/// terminal waits: it is annotated with the counter value current when the
/// next `(`, terminal, or the end of input arrives, i.e. after the run of
/// `)` that closes it has been counted down.
pub fn parenthesis_count(b: &Bracketing, rule: StressRule) -> Result<StressVector, StressError> {
    b.to_tree()?;
    match rule {
        StressRule::Nuclear => Ok(count_pass(&b.tokens)),
        StressRule::Compound => {
            let mirrored = count_pass(&b.mirrored().tokens);
            let labels = mirrored.labels.map(|mut l| {
                l.reverse();
                l
            });
            let mut indices = mirrored.indices;
            indices.reverse();
            Ok(StressVector { labels, indices })
        }
    }
}

fn count_pass(tokens: &[Token]) -> StressVector {
    let words: Vec<String> = tokens
        .iter()
        .filter_map(|t| match t {
            Token::Terminal(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if words.len() == 1 {
        // a lone word carries primary stress however it is wrapped
        return StressVector::labelled(words, vec![1]);
    }
    let mut counter: i64 = 1;
    let mut labels = Vec::new();
    let mut indices: Vec<i64> = Vec::new();
    let mut pending: Option<usize> = None;
    let mut last: Option<&Token> = None;
    for tok in tokens {
        match tok {
            Token::Left => {
                if let Some(p) = pending.take() {
                    indices[p] = counter;
                }
                counter += 1;
            }
            Token::Right => counter -= 1,
            Token::Terminal(s) => {
                if let Some(p) = pending.take() {
                    indices[p] = counter;
                }
                labels.push(s.clone());
                if matches!(last, Some(Token::Left)) {
                    indices.push(counter);
                } else {
                    indices.push(0);
                    pending = Some(indices.len() - 1);
                }
            }
        }
        last = Some(tok);
    }
    if let Some(p) = pending {
        indices[p] = counter;
    }
    StressVector::labelled(labels, indices.into_iter().map(|i| i as u32).collect())
}

/// Output of the shift-reduce parser. Each reduce node carries the smaller
/// of its two daughters' numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumberTree {
    Leaf(u32),
    Node {
        left: Box<NumberTree>,
        right: Box<NumberTree>,
        number: u32,
    },
}

impl NumberTree {
    pub fn number(&self) -> u32 {
        match self {
            NumberTree::Leaf(n) => *n,
            NumberTree::Node { number, .. } => *number,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            NumberTree::Leaf(_) => Shape::Leaf,
            NumberTree::Node { left, right, .. } => {
                Shape::Node(Box::new(left.shape()), Box::new(right.shape()))
            }
        }
    }

    pub fn leaves(&self) -> Vec<u32> {
        match self {
            NumberTree::Leaf(n) => vec![*n],
            NumberTree::Node { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    /// Parenthesis string with the leaf numbers as terminals.
    pub fn to_bracketing(&self) -> Bracketing {
        fn to_tree(t: &NumberTree) -> Tree {
            match t {
                NumberTree::Leaf(n) => Tree::Leaf(n.to_string()),
                NumberTree::Node { left, right, .. } => {
                    Tree::Node(Box::new(to_tree(left)), Box::new(to_tree(right)))
                }
            }
        }
        to_tree(self).to_bracketing()
    }
}

/// Nested-array encoding: a leaf is its number, a node is
/// `[[left, right], number]`.
impl Serialize for NumberTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            NumberTree::Leaf(n) => serializer.serialize_u32(*n),
            NumberTree::Node {
                left,
                right,
                number,
            } => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&[left.as_ref(), right.as_ref()])?;
                seq.serialize_element(number)?;
                seq.end()
            }
        }
    }
}

/// Shift-reduce parse of a stress vector under the nuclear rule.
///
/// Numbers are shifted left to right; whenever the item below the top of
/// the stack carries a larger number than the top, the two are reduced into
/// one node carrying the smaller number. The parse succeeds iff one tree
/// remains and that tree reproduces the input numbers.
pub fn parse_numbers_to_tree(v: &StressVector) -> Result<NumberTree, StressError> {
    let unparseable = || StressError::Unparseable(v.indices.clone());
    if v.indices.is_empty() || v.indices.contains(&0) {
        return Err(unparseable());
    }
    let mut stack: Vec<NumberTree> = Vec::with_capacity(v.len());
    for &n in &v.indices {
        stack.push(NumberTree::Leaf(n));
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1].number();
            let next = stack[stack.len() - 2].number();
            if next <= top {
                break;
            }
            let right = stack.pop().unwrap();
            let left = stack.pop().unwrap();
            stack.push(NumberTree::Node {
                number: left.number().min(right.number()),
                left: Box::new(left),
                right: Box::new(right),
            });
        }
    }
    if stack.len() != 1 {
        return Err(unparseable());
    }
    let tree = stack.pop().unwrap();
    // greedy reduction also accepts e.g. [3, 1]; only trees that regenerate
    // the input count as parses
    let regenerated = count_pass(&tree.to_bracketing().tokens);
    if regenerated.indices != v.indices {
        return Err(unparseable());
    }
    Ok(tree)
}

/// Result of [`numbers_to_bracketing`]. `balanced` is true when the output
/// is one well-formed binary bracketing; sequences that no bracketing
/// produces under the nuclear rule give unbalanced or disconnected output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InverseBracketing {
    pub bracketing: Bracketing,
    pub balanced: bool,
}

/// Inverse nuclear stress rule as a string generator: starting from a seed
/// of 1, a rise by k opens k brackets before the number and a fall by k
/// closes k brackets after it.
pub fn numbers_to_bracketing(v: &StressVector) -> InverseBracketing {
    let mut tokens = Vec::new();
    let mut previous = 1u32;
    for &n in &v.indices {
        if n > previous {
            tokens.extend(std::iter::repeat_n(Token::Left, (n - previous) as usize));
            tokens.push(Token::Terminal(n.to_string()));
        } else {
            tokens.push(Token::Terminal(n.to_string()));
            tokens.extend(std::iter::repeat_n(Token::Right, (previous - n) as usize));
        }
        previous = n;
    }
    let bracketing = Bracketing { tokens };
    let balanced = bracketing.to_tree().is_ok();
    InverseBracketing {
        bracketing,
        balanced,
    }
}

/// Every binary tree shape with exactly `leaves` leaves.
pub fn all_shapes(leaves: usize) -> Vec<Shape> {
    if leaves == 0 {
        return Vec::new();
    }
    if leaves == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for k in 1..leaves {
        let lefts = all_shapes(k);
        let rights = all_shapes(leaves - k);
        for l in &lefts {
            for r in &rights {
                out.push(Shape::Node(Box::new(l.clone()), Box::new(r.clone())));
            }
        }
    }
    out
}
