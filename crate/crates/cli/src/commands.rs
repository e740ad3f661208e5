//! Command implementations. Every command validates its inputs before any
//! compute and writes only inside its output directory.

use crate::config::{
    load_file_config, parse_goal, resolve_task, train_config_from_section, FileConfig,
};
use crate::plot::{export_plot, PlotKind, PlotSpec};
use diayn_core::metrics::{metric_table, Table};
use diayn_core::oracle::{
    border_length, exact_objective, half_grid_region, lemma2_closed_form, partition_objective,
    verify_fig5_policy, SkillChain,
};
use diayn_core::{
    estimate_objective, finetune, imitate, load_checkpoint, meta_eval, meta_train, resume_train,
    reward_histogram, save_checkpoint, select_best_skill, train, Error, ExpertTrajectory,
    GridWorld, InitMode, ObjectiveReport, Result, TaskReward, TrainState,
};
use std::path::PathBuf;

fn ensure_out_dir(flag: Option<PathBuf>, file: &FileConfig, default: &str) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(default));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn print_objective(report: &ObjectiveReport) {
    println!(
        "H[Z] = {:.6}  H[Z|S] = {:.6}  H[A|S,Z] = {:.6}",
        report.h_z, report.h_z_given_s, report.h_a_given_sz
    );
    println!(
        "F = {:.6}  G = {:.6}  effective skills = {:.3}",
        report.f_estimate, report.g_estimate, report.effective_skills
    );
}

pub struct TrainArgs {
    pub config: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub seed: Option<u64>,
    pub episodes: Option<u64>,
    pub skills: Option<usize>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn cmd_train(args: TrainArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let out_dir = ensure_out_dir(args.out.clone(), &file, "runs/train")?;

    let (mut state, reports) = if let Some(resume_path) = &args.resume {
        let mut state = load_checkpoint(resume_path)?;
        let episodes = args.episodes.unwrap_or(state.config.episodes);
        let reports = resume_train(&mut state, episodes)?;
        (state, reports)
    } else {
        let mut cfg = train_config_from_section(file.train.clone())?;
        if let Some(seed) = args.seed.or(file.seed) {
            cfg.seed = seed;
        }
        if let Some(episodes) = args.episodes {
            cfg.episodes = episodes;
        }
        if let Some(skills) = args.skills {
            cfg.skills = skills;
        }
        if let Some(alpha) = args.alpha {
            cfg.alpha = alpha;
        }
        cfg.validate()?;
        let result = train(&cfg)?;
        (result.state, result.reports)
    };

    let ckpt_path = out_dir.join("checkpoint.json");
    save_checkpoint(&ckpt_path, &state)?;
    let metrics_path = out_dir.join("metrics.csv");
    metric_table(&reports).write(&metrics_path)?;

    let report = estimate_objective(&state, 50)?;
    println!("episodes done: {}", state.episodes_done);
    print_objective(&report);
    println!("checkpoint: {}", ckpt_path.display());
    println!("metrics: {}", metrics_path.display());
    let _ = &mut state;
    Ok(())
}

pub struct TaskArgs {
    pub task_kind: Option<String>,
    pub goal: Option<String>,
}

impl TaskArgs {
    fn resolve(&self, section_task: Option<&diayn_core::envs::task::TaskRewardConfig>) -> Result<TaskReward> {
        let goal = self.goal.as_deref().map(parse_goal).transpose()?;
        resolve_task(section_task, self.task_kind.as_deref(), goal.as_deref())
    }
}

pub struct EvalArgs {
    pub config: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub episodes: Option<usize>,
    pub task: TaskArgs,
    pub out: Option<PathBuf>,
}

fn required_checkpoint(flag: Option<PathBuf>, section: Option<PathBuf>) -> Result<TrainState> {
    let path = flag
        .or(section)
        .ok_or_else(|| Error::config("no checkpoint given (flag --checkpoint or config key)"))?;
    load_checkpoint(&path)
}

pub fn cmd_eval(args: EvalArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let section = file.eval.clone().unwrap_or_default();
    let state = required_checkpoint(args.checkpoint.clone(), section.checkpoint.clone())?;
    let task = args.task.resolve(section.task.as_ref())?;
    let episodes = args.episodes.or(section.episodes).unwrap_or(5);
    let out_dir = ensure_out_dir(args.out.clone(), &file, "runs/eval")?;

    let histogram = reward_histogram(&state, &task, episodes)?;
    let mut table = Table::new(&["skill", "episode", "return"]);
    for (z, returns) in histogram.iter().enumerate() {
        for (e, r) in returns.iter().enumerate() {
            table.push(vec![z as f64, e as f64, *r]);
        }
    }
    let records_path = out_dir.join("skill_rewards.csv");
    table.write(&records_path)?;

    for (z, returns) in histogram.iter().enumerate() {
        let mean: f64 = returns.iter().sum::<f64>() / returns.len().max(1) as f64;
        println!("skill {z}: mean return {mean:.6}");
    }
    let (best, best_mean) = select_best_skill(&state, &task, episodes)?;
    println!("best skill: {best} (mean return {best_mean:.6})");
    println!("records: {}", records_path.display());
    Ok(())
}

pub struct FinetuneArgs {
    pub config: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub budget: Option<u64>,
    pub init: Option<String>,
    pub seed: Option<u64>,
    pub eval_episodes: Option<usize>,
    pub task: TaskArgs,
    pub out: Option<PathBuf>,
}

pub fn cmd_finetune(args: FinetuneArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let section = file.finetune.clone().unwrap_or_default();
    let state = required_checkpoint(args.checkpoint.clone(), section.checkpoint.clone())?;
    let task = args.task.resolve(section.task.as_ref())?;
    let budget = args.budget.or(section.budget).unwrap_or(200);
    let seed = args.seed.or(section.seed).or(file.seed).unwrap_or(0);
    let eval_episodes = args.eval_episodes.or(section.eval_episodes).unwrap_or(5);
    let init = match args
        .init
        .or(section.init)
        .unwrap_or_else(|| "pretrained".into())
        .as_str()
    {
        "pretrained" => InitMode::Pretrained,
        "random" => InitMode::Random,
        other => return Err(Error::config(format!("unknown init mode {other:?}"))),
    };
    let out_dir = ensure_out_dir(args.out.clone(), &file, "runs/finetune")?;

    let result = finetune(&state, &task, budget, init, seed, eval_episodes)?;
    let mut table = Table::new(&["episode", "return"]);
    for (e, r) in result.curve.iter().enumerate() {
        table.push(vec![e as f64, *r]);
    }
    let curve_path = out_dir.join("finetune_curve.csv");
    table.write(&curve_path)?;
    println!("adapted skill {} for {budget} episodes", result.skill);
    println!("final greedy return: {:.6}", result.final_return);
    println!("curve: {}", curve_path.display());
    Ok(())
}

pub struct HierArgs {
    pub config: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub k: Option<usize>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub eval_episodes: Option<usize>,
    pub task: TaskArgs,
    pub out: Option<PathBuf>,
}

pub fn cmd_hier(args: HierArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let section = file.hier.clone().unwrap_or_default();
    let state = required_checkpoint(args.checkpoint.clone(), section.checkpoint.clone())?;
    let task = args.task.resolve(section.task.as_ref())?;
    let episode_len = state.config.env.episode_len()?;
    let k = args.k.or(section.k).unwrap_or(episode_len);
    let budget = args.budget.or(section.budget).unwrap_or(200);
    let seed = args.seed.or(section.seed).or(file.seed).unwrap_or(0);
    let eval_episodes = args.eval_episodes.or(section.eval_episodes).unwrap_or(5);
    let out_dir = ensure_out_dir(args.out.clone(), &file, "runs/hier")?;

    let result = meta_train(&state, &task, k, budget, seed)?;
    let mut table = Table::new(&["episode", "return"]);
    for (e, r) in result.curve.iter().enumerate() {
        table.push(vec![e as f64, *r]);
    }
    let curve_path = out_dir.join("hier_curve.csv");
    table.write(&curve_path)?;
    let eval = meta_eval(&state, &result.controller, &task, eval_episodes, seed ^ 0xe)?;
    println!(
        "meta-controller over {} skills, horizon {k}: eval return {eval:.6}",
        state.agent.num_skills()
    );
    println!("curve: {}", curve_path.display());
    Ok(())
}

pub struct ImitateArgs {
    pub config: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn cmd_imitate(args: ImitateArgs) -> Result<()> {
    let file = load_file_config(args.config.as_deref())?;
    let section = file.imitate.clone().unwrap_or_default();
    let state = required_checkpoint(args.checkpoint.clone(), section.checkpoint.clone())?;
    let traj_path = args
        .trajectory
        .or(section.trajectory)
        .ok_or_else(|| Error::config("no expert trajectory file given"))?;
    let table = Table::read(&traj_path)?;
    let tau = ExpertTrajectory::new(table.rows.clone());
    let (z_hat, score) = imitate(&state, &tau)?;
    println!("retrieved skill {z_hat} with score {score:.6}");
    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        let mut t = Table::new(&["skill", "score"]);
        t.push(vec![z_hat as f64, score]);
        let p = out.join("imitation.csv");
        t.write(&p)?;
        println!("records: {}", p.display());
    }
    Ok(())
}

pub struct OracleArgs {
    pub n: Option<usize>,
    pub dims: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn cmd_oracle(args: OracleArgs) -> Result<()> {
    if args.n.is_none() && args.dims.is_none() {
        return Err(Error::config("oracle needs --n or --dims"));
    }
    let mut records = Table::new(&["n", "closed_form_h", "gap", "exact_h", "abs_err"]);

    if let Some(n) = args.n {
        let (h, gap) = lemma2_closed_form(n)?;
        let grid = GridWorld::new(n);
        let bottom = SkillChain::region_uniform(&grid, &half_grid_region(&grid, false))?;
        let top = SkillChain::region_uniform(&grid, &half_grid_region(&grid, true))?;
        let report = exact_objective(&[bottom, top], &[0.5, 0.5])?;
        let verified = verify_fig5_policy(n)?;
        println!("grid side N = {n}, two skills, even split");
        println!("  {:<28}{:>12.6}", "closed-form H[A|S,Z]", h);
        println!("  {:<28}{:>12.6}", "gap from optimum", gap);
        println!("  {:<28}{:>12.6}", "exact construction H[A|S,Z]", report.h_a_given_sz);
        println!("  {:<28}{:>12.6}", "exact H[Z|S]", report.h_z_given_s);
        println!("  {:<28}{:>12.6}", "exact H[Z]", report.h_z);
        println!(
            "  stationary 2/N^2 + detailed balance: {}",
            if verified { "VERIFIED" } else { "FAILED" }
        );
        records.push(vec![
            n as f64,
            h,
            gap,
            report.h_a_given_sz,
            (h - report.h_a_given_sz).abs(),
        ]);
    }

    if let Some(dims) = &args.dims {
        let (w, h) = parse_dims(dims)?;
        if w % 2 != 0 && h % 2 != 0 {
            return Err(Error::input("partition comparison needs one even dimension"));
        }
        let cells = w * h;
        let long_axis = if w >= h { "x" } else { "y" };
        // Split across the longer dimension (short border) and the shorter
        // one (long border).
        let split_x: Vec<usize> = (0..cells).map(|c| usize::from(c % w >= w / 2)).collect();
        let split_y: Vec<usize> = (0..cells).map(|c| usize::from(c / w >= h / 2)).collect();
        let (short_border, long_border) = if w >= h {
            (split_x, split_y)
        } else {
            (split_y, split_x)
        };
        let sb_len = border_length((w, h), &short_border);
        let lb_len = border_length((w, h), &long_border);
        let sb_obj = partition_objective((w, h), &short_border, 2)?;
        let lb_obj = partition_objective((w, h), &long_border, 2)?;
        println!("grid {w} x {h}, two skills");
        println!("  {:<24}{:>8}{:>14}", "split", "border", "objective");
        println!("  {:<24}{:>8}{:>14.6}", format!("across {long_axis} (short border)"), sb_len, sb_obj);
        println!("  {:<24}{:>8}{:>14.6}", "across the other axis", lb_len, lb_obj);
        let preferred = if sb_obj > lb_obj { "short-border split" } else { "long-border split" };
        println!("  preferred: {preferred}");
    }

    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        if !records.rows.is_empty() {
            let p = out.join("oracle.csv");
            records.write(&p)?;
            println!("records: {}", p.display());
        }
    }
    Ok(())
}

fn parse_dims(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(Error::config(format!("bad dims {text:?} (expected WxH)")));
    }
    let w = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("bad width {:?}", parts[0])))?;
    let h = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("bad height {:?}", parts[1])))?;
    if w == 0 || h == 0 {
        return Err(Error::config("dims must be positive"));
    }
    Ok((w, h))
}

pub struct PlotArgs {
    pub kind: String,
    pub input: PathBuf,
    pub output: PathBuf,
    pub x_label: String,
    pub y_label: String,
    pub column: Option<String>,
}

pub fn cmd_plot(args: PlotArgs) -> Result<()> {
    let spec = PlotSpec {
        kind: PlotKind::parse(&args.kind)?,
        input: args.input,
        x_label: args.x_label,
        y_label: args.y_label,
        output: args.output.clone(),
        column: args.column,
    };
    export_plot(&spec)?;
    println!("plot: {}", args.output.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("4x8").unwrap(), (4, 8));
        assert_eq!(parse_dims(" 2 x 3 ").unwrap(), (2, 3));
        assert!(parse_dims("4").is_err());
        assert!(parse_dims("0x3").is_err());
    }
}
