//! The misconception registry, misconception sets, and the prior over them.

use alloc::vec::Vec;
use core::fmt;

/// One of the 32 modeled misconceptions, numbered as in the registry table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MisconceptionId(u8);

/// Registry row: stable name, corrective message, and the erroneous
/// behavior the flag switches on.
#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub id: MisconceptionId,
    pub name: &'static str,
    pub message: &'static str,
    pub behavior: &'static str,
}

macro_rules! registry {
    ($($idx:literal $konst:ident $name:literal $msg:literal $beh:literal;)*) => {
        impl MisconceptionId {
            $(pub const $konst: MisconceptionId = MisconceptionId($idx);)*
        }
        static REGISTRY: [Entry; 32] = [
            $(Entry { id: MisconceptionId($idx), name: $name, message: $msg, behavior: $beh },)*
        ];
    };
}

// Flags 4, 5, 9, 12 and 15 are not pinned by any observed distractor; their
// behaviors below are the smallest change that contradicts the message.
registry! {
    1 TYPEOF_NULL_IS_NULL "typeof_null_is_null"
        "For historical reasons, null has type \"object\" (not \"null\", as you might expect)."
        "typeof(null) evaluates to \"null\"";
    2 TYPEOF_ARRAY_IS_ARRAY "typeof_array_is_array"
        "Arrays have type \"object\" (not \"array\", as you might expect)."
        "typeof of an array evaluates to \"array\"";
    3 NAN_EQUALS_NAN "nan_equals_nan"
        "As a special case, NaN is never equal to anything (even NaN itself)."
        "NaN === NaN and NaN == NaN are true";
    4 EMPTY_OBJECT_IS_FALSEY "empty_object_is_falsey"
        "Empty objects ({} and []) are truthy."
        "{} and [] are falsey; && stopping on one yields false";
    5 UNDEFINED_PRINTS_IN_ARRAY "undefined_prints_in_array"
        "undefined is printed as empty string when arrays are cast to string."
        "undefined elements render as \"undefined\" when an array is joined";
    6 NULL_PRINTS_IN_ARRAY "null_prints_in_array"
        "null is printed as empty string when arrays are cast to string."
        "null elements render as \"null\" when an array is joined";
    7 NAN_PRINTS_EMPTY "nan_prints_empty"
        "NaN prints as the string \"NaN\" (not \"\", as you might expect)."
        "ToString(NaN) is \"\"";
    8 NULL_PRINTS_EMPTY "null_prints_empty"
        "null casts to the string \"null\", not the empty string."
        "ToString(null) is \"\"";
    9 UNDEFINED_PRINTS_EMPTY "undefined_prints_empty"
        "undefined casts to the string \"undefined\" (not \"\", as you might expect)."
        "ToString(undefined) is \"\"";
    10 OBJECT_TO_NUMBER_IS_ZERO "object_to_number_is_zero"
        "{} is NaN (not 0) when cast to number."
        "ToNumber of a plain object is 0";
    11 ZERO_INDEXED "zero_indexed"
        "JavaScript is 0-indexed, not 1-indexed."
        "subscript n reads element n-1 of an array or string";
    12 UNDEFINED_TO_NUMBER_IS_ZERO "undefined_to_number_is_zero"
        "undefined casts to number as NaN (not 0, as you might expect)."
        "ToNumber(undefined) is 0";
    13 NULL_TO_NUMBER_IS_NAN "null_to_number_is_nan"
        "null casts to number as 0 (not NaN, as you might expect)."
        "ToNumber(null) is NaN";
    14 SORT_IS_NUMERIC "sort_is_numeric"
        "Array.prototype.sort() casts elements (including numbers) to string and compares them lexicographically."
        "sort() compares two numbers numerically";
    15 NULLISH_INCLUDES_FALSE "nullish_includes_false"
        "?? does not treat false as null-ish."
        "?? falls through to its right operand on false";
    16 NULLISH_INCLUDES_NAN "nullish_includes_nan"
        "?? does not treat NaN as null-ish."
        "?? falls through to its right operand on NaN";
    17 PLUS_CONCATENATES_ARRAYS "plus_concatenates_arrays"
        "The + operator does not concatenate arrays; instead, it casts them to strings."
        "array + array is the concatenated array";
    18 LOGICAL_OPS_RETURN_BOOL "logical_ops_return_bool"
        "Short-circuiting boolean operators like && and || return the determining operand (rather than a boolean value)."
        "&& and || convert their result to a boolean";
    19 LOOSE_EQUALITY_IS_STRICT "loose_equality_is_strict"
        "The == operator, unlike the === operator, attempts a series of type coercions that can cause unexpected results."
        "== behaves exactly like ===";
    20 PLUS_REQUIRES_NUMBER_OR_STRING "plus_requires_number_or_string"
        "When given operands that are neither numbers nor strings, + tries to cast them to numbers (if possible) or else strings."
        "+ with neither operand a number or string is an error";
    21 OBJECT_TO_STRING_IS_BRACES "object_to_string_is_braces"
        "Objects cast to the string \"[object Object]\"."
        "ToString of a plain object is \"{}\"";
    22 ARRAY_TOSTRING_HAS_BRACKETS "array_tostring_has_brackets"
        "When converted to string, arrays don't have the square brackets around them."
        "ToString of an array wraps the joined elements in [ and ]";
    23 EMPTY_STRING_TO_NUMBER_IS_NAN "empty_string_to_number_is_nan"
        "The empty string by definition casts to 0 (not NaN, as you might expect)."
        "ToNumber(\"\") is NaN";
    24 PLUS_ADDS_WITH_ANY_NUMBER "plus_adds_with_any_number"
        "The + operator only attempts to add if both sides are numbers. Otherwise, it casts its operands to string and concatenates."
        "+ adds numerically whenever either primitive operand is a number";
    25 PRIMITIVE_SUBSCRIPT_ERRORS "primitive_subscript_errors"
        "When subscripted, primitive booleans and numbers are implicitly converted to Boolean and Number objects."
        "subscripting a boolean or number is an error";
    26 LOOSE_EQUALITY_CASTS_TO_BOOL "loose_equality_casts_to_bool"
        "When one side of an == is a boolean, JS does not attempt to convert the other side to a boolean as well. Instead, the boolean is converted to a number (0 or 1) and the comparison is tried again."
        "== with a boolean side converts the other side to boolean";
    27 GE_IS_GT_OR_EQ "ge_is_gt_or_eq"
        "The >= operator is defined as the negation of <, rather than the disjunction of > and ==."
        "a >= b evaluates as (b < a) || (a == b)";
    28 LT_ALWAYS_NUMERIC "lt_always_numeric"
        "If neither operand is a number, then < compares string representations of the operands lexicographically."
        "< converts two strings to numbers before comparing";
    29 BRACKETS_SORT_AFTER_LOWERCASE "brackets_sort_after_lowercase"
        "The characters \"[\" and \"]\" sort after capital letters but before lowercase letters."
        "[ and ] order after lowercase letters";
    30 COMMA_SORTS_LAST "comma_sorts_last"
        "The comma character (\",\") sorts before all letters, numbers, and delimiters."
        "\",\" orders after every other character";
    31 EQUALITY_COMPARES_STRUCTURE "equality_compares_structure"
        "== and === compare objects and arrays by reference, not by value."
        "== and === compare objects and arrays by structure";
    32 STRING_SUBSCRIPTS_DONT_INDEX "string_subscripts_dont_index"
        "JavaScript casts all indices to string. When indexing arrays and strings, it checks if the indices represent numbers."
        "a non-number subscript never indexes an array or string";
}

impl MisconceptionId {
    pub const COUNT: usize = 32;

    pub fn new(index: u8) -> Option<Self> {
        (1..=32).contains(&index).then_some(MisconceptionId(index))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        REGISTRY.iter().find(|e| e.name == name).map(|e| e.id)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = MisconceptionId> + Clone {
        (1..=32).map(MisconceptionId)
    }

    pub fn entry(self) -> &'static Entry {
        &REGISTRY[self.0 as usize - 1]
    }

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    pub fn message(self) -> &'static str {
        self.entry().message
    }

    /// A flag whose message is reported alongside this one. Numeric sort
    /// beliefs are explained together with lexicographic `<`.
    pub fn companion(self) -> Option<MisconceptionId> {
        (self == Self::SORT_IS_NUMERIC).then_some(Self::LT_ALWAYS_NUMERIC)
    }

    fn bit(self) -> u32 {
        1 << (self.0 - 1)
    }
}

impl fmt::Display for MisconceptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All 32 registry entries in table order.
pub fn registry() -> &'static [Entry] {
    &REGISTRY
}

/// A set of misconception flags; the empty set is the true semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MisconceptionSet(u32);

impl MisconceptionSet {
    pub const EMPTY: MisconceptionSet = MisconceptionSet(0);
    pub const ALL: MisconceptionSet = MisconceptionSet(u32::MAX);

    pub fn from_bits(bits: u32) -> Self {
        MisconceptionSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn single(id: MisconceptionId) -> Self {
        MisconceptionSet(id.bit())
    }

    /// Builds a set from 1-based indices; out-of-range indices are ignored.
    pub fn of(indices: &[u8]) -> Self {
        indices.iter().filter_map(|&i| MisconceptionId::new(i)).collect()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, id: MisconceptionId) -> bool {
        self.0 & id.bit() != 0
    }

    pub fn insert(&mut self, id: MisconceptionId) {
        self.0 |= id.bit();
    }

    pub fn with(self, id: MisconceptionId) -> Self {
        MisconceptionSet(self.0 | id.bit())
    }

    pub fn without(self, id: MisconceptionId) -> Self {
        MisconceptionSet(self.0 & !id.bit())
    }

    pub fn union(self, other: Self) -> Self {
        MisconceptionSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        MisconceptionSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        MisconceptionSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    /// Members in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = MisconceptionId> {
        let bits = self.0;
        (1..=32u8).filter(move |i| bits & (1 << (i - 1)) != 0).map(MisconceptionId)
    }

    pub fn indices(self) -> Vec<u8> {
        self.iter().map(|m| m.0).collect()
    }

    /// All subsets of `self` with at most `cap` members, ordered by size and
    /// then lexicographically by ascending index tuple.
    pub fn subsets_up_to(self, cap: usize) -> Vec<MisconceptionSet> {
        let members: Vec<MisconceptionId> = self.iter().collect();
        let mut out = Vec::new();
        for k in 0..=cap.min(members.len()) {
            let mut chosen = Vec::with_capacity(k);
            combinations(&members, k, 0, &mut chosen, &mut out);
        }
        out
    }

    /// Compares ascending index tuples lexicographically.
    pub fn cmp_lex(self, other: Self) -> core::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

fn combinations(
    members: &[MisconceptionId],
    k: usize,
    start: usize,
    chosen: &mut Vec<MisconceptionId>,
    out: &mut Vec<MisconceptionSet>,
) {
    if chosen.len() == k {
        out.push(chosen.iter().copied().collect());
        return;
    }
    for i in start..members.len() {
        if members.len() - i < k - chosen.len() {
            break;
        }
        chosen.push(members[i]);
        combinations(members, k, i + 1, chosen, out);
        chosen.pop();
    }
}

impl FromIterator<MisconceptionId> for MisconceptionSet {
    fn from_iter<I: IntoIterator<Item = MisconceptionId>>(iter: I) -> Self {
        let mut s = MisconceptionSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Display for MisconceptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("misconception probability must lie strictly between 0 and 1, got {0}")]
pub struct InvalidProbability(pub f64);

/// Independent per-flag probabilities: P(M) is the product of q_i over M.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorModel {
    q: [f64; 32],
}

impl Default for PriorModel {
    fn default() -> Self {
        PriorModel { q: [Self::DEFAULT_Q; 32] }
    }
}

impl PriorModel {
    pub const DEFAULT_Q: f64 = 0.1;

    pub fn uniform(q: f64) -> Result<Self, InvalidProbability> {
        check(q)?;
        Ok(PriorModel { q: [q; 32] })
    }

    pub fn with_override(mut self, id: MisconceptionId, q: f64) -> Result<Self, InvalidProbability> {
        check(q)?;
        self.q[id.0 as usize - 1] = q;
        Ok(self)
    }

    pub fn q(&self, id: MisconceptionId) -> f64 {
        self.q[id.0 as usize - 1]
    }

    pub fn is_uniform(&self) -> bool {
        self.q.iter().all(|&x| x == self.q[0])
    }

    pub fn log_prior(&self, set: MisconceptionSet) -> f64 {
        set.iter().map(|m| libm::log(self.q(m))).sum()
    }

    pub fn prior(&self, set: MisconceptionSet) -> f64 {
        libm::exp(self.log_prior(set))
    }

    /// Search order: descending prior, then fewer flags, then ascending
    /// index tuple. Stable and total, so results are reproducible.
    pub fn search_cmp(&self, a: MisconceptionSet, b: MisconceptionSet) -> core::cmp::Ordering {
        self.log_prior(b)
            .partial_cmp(&self.log_prior(a))
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.len().cmp(&b.len()))
            .then(a.cmp_lex(b))
    }

    /// Subsets of `universe` with at most `cap` flags, in search order.
    pub fn search_order(&self, universe: MisconceptionSet, cap: usize) -> Vec<MisconceptionSet> {
        let mut sets = universe.subsets_up_to(cap);
        if !self.is_uniform() {
            sets.sort_by(|a, b| self.search_cmp(*a, *b));
        }
        sets
    }
}

fn check(q: f64) -> Result<(), InvalidProbability> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(InvalidProbability(q))
    }
}
