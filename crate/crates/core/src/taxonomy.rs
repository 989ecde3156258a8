// SPDX-License-Identifier: Apache-2.0

//! ODC defect categories and the subcategories used to steer bug injection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Assignment,
    Checking,
    Algorithm,
    #[serde(rename = "Build/Package/Merge")]
    BuildPackageMerge,
    #[serde(rename = "Timing/Serialization")]
    TimingSerialization,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Assignment,
        Category::Checking,
        Category::Algorithm,
        Category::BuildPackageMerge,
        Category::TimingSerialization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Assignment => "Assignment",
            Category::Checking => "Checking",
            Category::Algorithm => "Algorithm",
            Category::BuildPackageMerge => "Build/Package/Merge",
            Category::TimingSerialization => "Timing/Serialization",
        }
    }

    pub fn subcategories(self) -> impl Iterator<Item = &'static Subcategory> {
        TAXONOMY.iter().filter(move |s| s.category == self)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown ODC category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subcategory {
    pub category: Category,
    pub name: &'static str,
    pub description: &'static str,
}

const fn sub(category: Category, name: &'static str, description: &'static str) -> Subcategory {
    Subcategory { category, name, description }
}

use Category::*;

pub static TAXONOMY: [Subcategory; 24] = [
    sub(Assignment, "Mutability Trap", "A mutable default parameter keeps state between calls."),
    sub(Assignment, "Late Binding in Closures", "A closure reads a loop variable after the loop has moved on."),
    sub(
        Assignment,
        "List Multiplication Surprise",
        "Repeating a nested list copies references, so rows alias each other.",
    ),
    sub(Assignment, "Built-in Shadowing", "A local name such as `sum` or `max` hides the built-in of that name."),
    sub(Assignment, "Variable Shadowing", "An inner assignment reuses a name the outer code still depends on."),
    sub(Assignment, "Name Error", "A name is read before any assignment gives it a value."),
    sub(Checking, "Off-by-One Error", "A bound, index, or count is one step too high or too low."),
    sub(Checking, "Negation Error", "A condition tests the opposite of what was meant."),
    sub(
        Checking,
        "Missing or Incomplete Checks",
        "A guard is absent, so an edge case raises or takes the wrong branch.",
    ),
    sub(Checking, "Overwriting Built-in Names", "A built-in is rebound and later calls to it misbehave."),
    sub(Checking, "Variable Shadowing", "A condition reads a rebound name and evaluates against the wrong value."),
    sub(
        Checking,
        "Chained Boolean Comparison Logic",
        "A chained or combined comparison groups differently than intended.",
    ),
    sub(Checking, "Implicit Boolean Conversion", "Truthiness treats empty values, zero, and None as the same case."),
    sub(Checking, "Membership Logic Flaws", "An `in` test checks keys, substrings, or elements other than intended."),
    sub(Algorithm, "Wrong Math Expression", "An arithmetic operator, operand, or constant in a formula is wrong."),
    sub(Algorithm, "Modifying While Iterating", "A collection changes size while a loop walks over it."),
    sub(
        Algorithm,
        "Function Algorithm Misunderstanding",
        "A library routine is used for a job it does not actually do.",
    ),
    sub(
        Algorithm,
        "Function Argument Misunderstanding",
        "An argument is dropped, reordered, or given the wrong meaning.",
    ),
    sub(Algorithm, "Infinite Loop / Recursion", "A loop or recursion can no longer reach its exit."),
    sub(Algorithm, "Other Logical Errors", "The steps run but break an invariant the result relies on."),
    sub(BuildPackageMerge, "Invalid API Call", "A method is called on a type that does not provide it."),
    sub(
        BuildPackageMerge,
        "Dependency Version Conflicts",
        "Code calls an API that another library version renamed or removed.",
    ),
    sub(TimingSerialization, "Serialization Issue", "A value that cannot be encoded is handed to a serializer."),
    sub(TimingSerialization, "Async Blocking", "A blocking call inside a coroutine holds up the event loop."),
];

pub fn find(category: Category, name: &str) -> Option<&'static Subcategory> {
    category.subcategories().find(|s| s.name == name)
}
