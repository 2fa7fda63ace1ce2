//! C interface to the catan-xdim engine, encoder and networks.
//!
//! Handles are opaque. Every fallible call returns a [`CxStatus`]; on
//! failure, [`cx_last_error_message`] describes the most recent error on
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use catan_xdim::encoding::action::{ActionLayout, NUM_SCALAR_SLOTS, SPATIAL_SIZE};
use catan_xdim::encoding::grid::CELLS;
use catan_xdim::encoding::{encode_state, BrickGrid, NUM_CHANNELS, NUM_SCALARS};
use catan_xdim::engine::{GameState, Outcome, Phase};
use catan_xdim::network::{checkpoint, forward, NetworkParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Size of the standard flat action space.
pub const CX_ACTION_COUNT: usize = 1261;
/// Values in an encoded board: 17 channels over the 11x21 grid.
pub const CX_BOARD_VALUES: usize = 3927;
pub const CX_SCALAR_VALUES: usize = 45;

const _: () = assert!(CX_ACTION_COUNT == SPATIAL_SIZE + NUM_SCALAR_SLOTS);
const _: () = assert!(CX_BOARD_VALUES == NUM_CHANNELS * CELLS);
const _: () = assert!(CX_SCALAR_VALUES == NUM_SCALARS);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    IllegalAction = 4,
    GameOver = 5,
    Io = 6,
    BadCheckpoint = 7,
    Panic = 8,
}

/// A game in progress with its own random stream.
pub struct CxGame {
    state: GameState,
    rng: ChaCha8Rng,
}

/// A loaded network.
pub struct CxNetwork {
    params: NetworkParams,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: CxStatus, msg: impl Into<String>) -> CxStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CxStatus) -> CxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CxStatus::Panic, "internal panic"),
    }
}

/// Message of the last failed call on this thread, empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Starts a game seeded with `seed`. A `turn_cap` of 0 uses the default.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cx_game_new(seed: u64, turn_cap: u32, out: *mut *mut CxGame) -> CxStatus {
    guard(|| {
        if out.is_null() {
            return fail(CxStatus::NullPointer, "out is null");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = if turn_cap == 0 {
            GameState::new(&mut rng)
        } else {
            GameState::with_turn_cap(&mut rng, turn_cap)
        };
        *out = Box::into_raw(Box::new(CxGame { state, rng }));
        CxStatus::Ok
    })
}

/// # Safety
/// `game` must come from [`cx_game_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cx_game_free(game: *mut CxGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

unsafe fn game_ref<'a>(game: *const CxGame) -> Result<&'a CxGame, CxStatus> {
    game.as_ref()
        .ok_or_else(|| fail(CxStatus::NullPointer, "game is null"))
}

/// Writes one byte per action (1 legal, 0 not) into `out[0..CX_ACTION_COUNT]`.
///
/// # Safety
/// `game` must be a live handle; `out` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cx_game_legal_mask(
    game: *const CxGame,
    out: *mut u8,
    len: usize,
) -> CxStatus {
    guard(|| {
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(CxStatus::NullPointer, "out is null");
        }
        if len < CX_ACTION_COUNT {
            return fail(
                CxStatus::BufferTooSmall,
                format!("mask needs {CX_ACTION_COUNT} bytes, got {len}"),
            );
        }
        let out = std::slice::from_raw_parts_mut(out, CX_ACTION_COUNT);
        out.fill(0);
        for i in ActionLayout::standard().legal_mask(&g.state).iter_set() {
            out[i] = 1;
        }
        CxStatus::Ok
    })
}

/// Applies the action with flat index `action`.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cx_game_apply(game: *mut CxGame, action: usize) -> CxStatus {
    guard(|| {
        let g = match game.as_mut() {
            Some(g) => g,
            None => return fail(CxStatus::NullPointer, "game is null"),
        };
        if g.state.is_terminal() {
            return fail(CxStatus::GameOver, "game is over");
        }
        let a = match ActionLayout::standard().decode(action) {
            Ok(a) => a,
            Err(e) => return fail(CxStatus::InvalidArgument, e.to_string()),
        };
        match g.state.apply_mut(a, &mut g.rng) {
            Ok(_) => CxStatus::Ok,
            Err(e) => fail(CxStatus::IllegalAction, e.to_string()),
        }
    })
}

/// Encodes the acting player's view: `board` receives
/// `CX_BOARD_VALUES` values (channel, row, column order) and `scalars`
/// receives `CX_SCALAR_VALUES` values.
///
/// # Safety
/// `game` must be a live handle; the buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn cx_game_encode(
    game: *const CxGame,
    board: *mut f64,
    board_len: usize,
    scalars: *mut f64,
    scalars_len: usize,
) -> CxStatus {
    guard(|| {
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        if board.is_null() || scalars.is_null() {
            return fail(CxStatus::NullPointer, "output buffer is null");
        }
        if board_len < CX_BOARD_VALUES || scalars_len < CX_SCALAR_VALUES {
            return fail(
                CxStatus::BufferTooSmall,
                format!(
                    "encoding needs {CX_BOARD_VALUES} board and {CX_SCALAR_VALUES} scalar values"
                ),
            );
        }
        let obs = g.state.observable(g.state.acting_player());
        let enc = encode_state(&obs, BrickGrid::standard());
        std::slice::from_raw_parts_mut(board, CX_BOARD_VALUES).copy_from_slice(&enc.channels);
        std::slice::from_raw_parts_mut(scalars, CX_SCALAR_VALUES).copy_from_slice(&enc.scalars);
        CxStatus::Ok
    })
}

/// Seat to move, or -1 when the game is over or the handle is null.
///
/// # Safety
/// `game` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cx_game_acting_player(game: *const CxGame) -> i32 {
    match game.as_ref() {
        Some(g) if !g.state.is_terminal() => g.state.acting_player() as i32,
        _ => -1,
    }
}

/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cx_game_is_terminal(game: *const CxGame, out: *mut bool) -> CxStatus {
    guard(|| {
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        match out.as_mut() {
            Some(o) => {
                *o = g.state.is_terminal();
                CxStatus::Ok
            }
            None => fail(CxStatus::NullPointer, "out is null"),
        }
    })
}

/// Winning seat, -1 for a draw or -2 while the game is running.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cx_game_winner(game: *const CxGame, out: *mut i32) -> CxStatus {
    guard(|| {
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let Some(o) = out.as_mut() else {
            return fail(CxStatus::NullPointer, "out is null");
        };
        *o = match g.state.phase {
            Phase::Terminal(Outcome::Winner(p)) => p as i32,
            Phase::Terminal(Outcome::Draw) => -1,
            _ => -2,
        };
        CxStatus::Ok
    })
}

/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cx_game_victory_points(
    game: *const CxGame,
    player: u32,
    include_hidden: bool,
    out: *mut u32,
) -> CxStatus {
    guard(|| {
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        if player > 1 {
            return fail(CxStatus::InvalidArgument, format!("no player {player}"));
        }
        let Some(o) = out.as_mut() else {
            return fail(CxStatus::NullPointer, "out is null");
        };
        *o = g.state.victory_points(player as usize, include_hidden);
        CxStatus::Ok
    })
}

/// Loads a checkpoint file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cx_network_load(
    path: *const c_char,
    out: *mut *mut CxNetwork,
) -> CxStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(CxStatus::NullPointer, "path or out is null");
        }
        let Ok(p) = CStr::from_ptr(path).to_str() else {
            return fail(CxStatus::InvalidArgument, "path is not UTF-8");
        };
        match checkpoint::load(Path::new(p)) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(CxNetwork { params }));
                CxStatus::Ok
            }
            Err(catan_xdim::network::NetworkError::Io(m)) => fail(CxStatus::Io, m),
            Err(e) => fail(CxStatus::BadCheckpoint, e.to_string()),
        }
    })
}

/// # Safety
/// `net` must come from [`cx_network_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cx_network_free(net: *mut CxNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Length of the network's logit vector, 0 for a null handle.
///
/// # Safety
/// `net` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cx_network_action_count(net: *const CxNetwork) -> usize {
    net.as_ref()
        .map(|n| SPATIAL_SIZE + n.params.config.scalar_logits())
        .unwrap_or(0)
}

/// Runs the network on the acting player's view of `game`, writing raw
/// logits and the value estimate.
///
/// # Safety
/// Handles must be live; `logits` must hold `logits_len` values and
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cx_network_forward(
    net: *const CxNetwork,
    game: *const CxGame,
    logits: *mut f64,
    logits_len: usize,
    value: *mut f64,
) -> CxStatus {
    guard(|| {
        let Some(n) = net.as_ref() else {
            return fail(CxStatus::NullPointer, "network is null");
        };
        let g = match game_ref(game) {
            Ok(g) => g,
            Err(s) => return s,
        };
        if logits.is_null() || value.is_null() {
            return fail(CxStatus::NullPointer, "output buffer is null");
        }
        let obs = g.state.observable(g.state.acting_player());
        let enc = encode_state(&obs, BrickGrid::standard());
        let out = match forward(&n.params, &enc) {
            Ok(o) => o,
            Err(e) => return fail(CxStatus::InvalidArgument, e.to_string()),
        };
        let all = out.logits();
        if logits_len < all.len() {
            return fail(
                CxStatus::BufferTooSmall,
                format!("logits need {} values, got {logits_len}", all.len()),
            );
        }
        std::slice::from_raw_parts_mut(logits, all.len()).copy_from_slice(&all);
        *value = out.value;
        CxStatus::Ok
    })
}
