//! Golden programs with their expected displays. Shared by the core
//! integration tests and the acceptance runner.
#![allow(dead_code)]

/// One diagnostic-table row: target flag, program, true output, the output
/// under the target flag alone, and further outputs seen with up to two flags.
pub struct DiagRow {
    pub id: u8,
    pub program: &'static str,
    pub truth: &'static str,
    pub distractor: &'static str,
    pub extras: &'static [&'static str],
}

pub const DIAG_ROWS: &[DiagRow] = &[
    DiagRow { id: 1, program: "[typeof(null), {}[[]]]", truth: r#"["object", undefined]"#, distractor: r#"["null", undefined]"#, extras: &[] },
    DiagRow { id: 2, program: "(typeof([]) ?? (false ? false : false))", truth: r#""object""#, distractor: r#""array""#, extras: &[] },
    DiagRow { id: 3, program: "(NaN === ({} - true))", truth: "false", distractor: "true", extras: &[] },
    DiagRow { id: 4, program: "((+undefined) ? {} : ({} ? null : true))", truth: "null", distractor: "true", extras: &[] },
    DiagRow {
        id: 5,
        program: r#"([undefined, undefined] + "")"#,
        truth: r#"",""#,
        distractor: r#""undefined,undefined""#,
        extras: &[r#""[,]""#, r#""[undefined,undefined]""#],
    },
    DiagRow {
        id: 6,
        program: r#"("10" + [null, []])"#,
        truth: r#""10,""#,
        distractor: r#""10null,""#,
        extras: &[r#""10[,[]]""#, r#""10[null,[]]""#],
    },
    DiagRow { id: 7, program: r#"(NaN + "10")"#, truth: r#""NaN10""#, distractor: r#""10""#, extras: &["NaN"] },
    DiagRow { id: 8, program: r#"("10" + null)"#, truth: r#""10null""#, distractor: r#""10""#, extras: &[] },
    DiagRow { id: 9, program: r#"((false ? undefined : undefined) + "")"#, truth: r#""undefined""#, distractor: r#""""#, extras: &[] },
    DiagRow { id: 10, program: "[NaN, (+{})]", truth: "[NaN, NaN]", distractor: "[NaN, 0]", extras: &[] },
    DiagRow { id: 11, program: "[false, true][1]", truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 12, program: "[({} ?? {}), (+undefined)]", truth: "[{}, NaN]", distractor: "[{}, 0]", extras: &[] },
    DiagRow { id: 13, program: "[false, (false - null)]", truth: "[false, 0]", distractor: "[false, NaN]", extras: &[] },
    // The true sort compares "10" < "2" and leaves the array in place.
    DiagRow { id: 14, program: "[10, 2].sort()", truth: "[10, 2]", distractor: "[2, 10]", extras: &[] },
    DiagRow { id: 15, program: "((false ?? true) == false)", truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 16, program: "(({} - undefined) ?? (!true))", truth: "NaN", distractor: "false", extras: &[] },
    DiagRow {
        id: 17,
        program: "[(!true), ([] + [])]",
        truth: r#"[false, ""]"#,
        distractor: "[false, []]",
        extras: &["(error)", r#"[false, "[][]"]"#],
    },
    DiagRow { id: 18, program: "((+true) || NaN)", truth: "1", distractor: "true", extras: &[] },
    DiagRow { id: 19, program: "[(undefined == null), (+true)]", truth: "[true, 1]", distractor: "[false, 1]", extras: &[] },
    DiagRow {
        id: 20,
        program: "((!true) ? ({} ? {} : false) : (undefined + null))",
        truth: "NaN",
        distractor: "(error)",
        extras: &["0"],
    },
    DiagRow { id: 21, program: r#"("0" + {})"#, truth: r#""0[object Object]""#, distractor: r#""0{}""#, extras: &[] },
    DiagRow { id: 22, program: r#"("" >= [])"#, truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 23, program: r#"("" - "")"#, truth: "0", distractor: "NaN", extras: &[] },
    DiagRow {
        id: 24,
        program: "([undefined, {}] + ([] - true))",
        truth: r#"",[object Object]-1""#,
        distractor: "NaN",
        extras: &[
            r#"",[object Object]NaN""#,
            r#""[,[object Object]]NaN""#,
            r#"",[object Object]""#,
            r#"",{}-1""#,
            r#""undefined,[object Object]-1""#,
        ],
    },
    DiagRow { id: 25, program: "(false[[]] === {})", truth: "false", distractor: "(error)", extras: &[] },
    DiagRow { id: 26, program: "((undefined == false) || (undefined == {}))", truth: "false", distractor: "true", extras: &[] },
    DiagRow { id: 27, program: r#"("," >= (+false))"#, truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 28, program: r#"("2" >= "10")"#, truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 29, program: r#"("[" < typeof(true))"#, truth: "true", distractor: "false", extras: &[] },
    DiagRow { id: 30, program: r#"("," >= [{}, []])"#, truth: "false", distractor: "true", extras: &[] },
    DiagRow { id: 31, program: r#"("" || ([] == []))"#, truth: "false", distractor: "true", extras: &[] },
    DiagRow { id: 32, program: r#"[[], {}]["1"]"#, truth: "{}", distractor: "undefined", extras: &["[]"] },
];

pub const C_IDX: &str = "console.log( [2, 7, 1, 8].sort()[1] );";
pub const C_LEX: &str = "console.log( [3, 4, 11, 10].sort()[1] );";
pub const C_SORT0: &str = "console.log( [3, 4, 11, 10].sort()[0] );";
pub const C_SORTED: &str = "[3, 4, 11, 10].sort()";
pub const B_PROGRAM: &str = r#"function f(x, y, t, u) {
  return (
    t == u ? "hello" : typeof(x)+"/"+typeof(y)
  );
}
console.log( f(null, undefined, {}, {}) );"#;
pub const A_STR: &str = r#"console.log("Answers:" + [true, null] + [false]);"#;
pub const A_TRUTHY: &str = r#"function f(x, y) { return x && ("" + y); }
console.log( f({}, [2,undefined,2]) );"#;
pub const WAT: &str = "[] + []";

/// Scenario programs with their true output displays.
pub const SCENARIOS: &[(&str, &str)] = &[
    (WAT, r#""""#),
    (C_IDX, "2"),
    (C_LEX, "11"),
    (C_SORT0, "10"),
    (C_SORTED, "[10, 11, 3, 4]"),
    (B_PROGRAM, r#""object/undefined""#),
    (A_STR, r#""Answers:true,false""#),
    (A_TRUTHY, r#""2,,2""#),
];

/// Every golden program source.
pub fn all_programs() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(p, _)| *p).chain(DIAG_ROWS.iter().map(|r| r.program)).collect()
}

pub mod gen;
pub mod oracle;
