use besselrad::wigner::MAX_J;
use besselrad::{wigner_3j, wigner_6j, AngularMomenta3j, WignerValue};
use serde_json::json;

use crate::output::{float, CliError};
use crate::{Global, Wigner3jArgs, Wigner6jArgs};

fn parse_list<T: std::str::FromStr>(raw: &str, len: usize, what: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = raw.split(',').map(|s| s.trim().parse::<T>()).collect();
    match items {
        Ok(v) if v.len() == len => Ok(v),
        _ => Err(CliError::usage(format!("{what} must be {len} comma-separated integers, got {raw:?}"))),
    }
}

fn check_j(js: &[u32]) -> Result<(), CliError> {
    match js.iter().find(|&&j| j > MAX_J) {
        Some(j) => Err(CliError::usage(format!("angular momentum {j} exceeds {MAX_J}"))),
        None => Ok(()),
    }
}

fn print(v: &WignerValue, global: &Global) {
    if global.json {
        let out = json!({ "exact": v.to_string(), "value": v.to_f64() });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("{}", v);
        println!("{}", float(v.to_f64()));
    }
}

pub fn run_3j(args: &Wigner3jArgs, global: &Global) -> Result<u8, CliError> {
    let j: Vec<u32> = parse_list(&args.j, 3, "--j")?;
    let m: Vec<i32> = parse_list(&args.m, 3, "--m")?;
    check_j(&j)?;
    if let Some(i) = (0..3).find(|&i| m[i].unsigned_abs() > j[i]) {
        return Err(CliError::usage(format!("|m{}| = {} exceeds j{} = {}", i + 1, m[i].abs(), i + 1, j[i])));
    }
    print(&wigner_3j(AngularMomenta3j::new([j[0], j[1], j[2]], [m[0], m[1], m[2]])), global);
    Ok(0)
}

pub fn run_6j(args: &Wigner6jArgs, global: &Global) -> Result<u8, CliError> {
    let j: Vec<u32> = parse_list(&args.j, 6, "--j")?;
    check_j(&j)?;
    print(&wigner_6j(j[0], j[1], j[2], j[3], j[4], j[5]), global);
    Ok(0)
}
