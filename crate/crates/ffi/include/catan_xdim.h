#ifndef CATAN_XDIM_H
#define CATAN_XDIM_H

/* Generated by cbindgen from the catan-xdim-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Size of the standard flat action space.
 */
#define CX_ACTION_COUNT 1261

/**
 * Values in an encoded board: 17 channels over the 11x21 grid.
 */
#define CX_BOARD_VALUES 3927

#define CX_SCALAR_VALUES 45

typedef enum CxStatus {
  CX_STATUS_OK = 0,
  CX_STATUS_NULL_POINTER = 1,
  CX_STATUS_INVALID_ARGUMENT = 2,
  CX_STATUS_BUFFER_TOO_SMALL = 3,
  CX_STATUS_ILLEGAL_ACTION = 4,
  CX_STATUS_GAME_OVER = 5,
  CX_STATUS_IO = 6,
  CX_STATUS_BAD_CHECKPOINT = 7,
  CX_STATUS_PANIC = 8,
} CxStatus;

/**
 * A game in progress with its own random stream.
 */
typedef struct CxGame CxGame;

/**
 * A loaded network.
 */
typedef struct CxNetwork CxNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *cx_last_error_message(void);

/**
 * Starts a game seeded with `seed`. A `turn_cap` of 0 uses the default.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CxStatus cx_game_new(uint64_t seed, uint32_t turn_cap, struct CxGame **out);

/**
 * # Safety
 * `game` must come from [`cx_game_new`] and not be freed twice.
 */
void cx_game_free(struct CxGame *game);

/**
 * Writes one byte per action (1 legal, 0 not) into `out[0..CX_ACTION_COUNT]`.
 *
 * # Safety
 * `game` must be a live handle; `out` must hold `len` bytes.
 */
enum CxStatus cx_game_legal_mask(const struct CxGame *game, uint8_t *out, size_t len);

/**
 * Applies the action with flat index `action`.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum CxStatus cx_game_apply(struct CxGame *game, size_t action);

/**
 * Encodes the acting player's view: `board` receives
 * `CX_BOARD_VALUES` values (channel, row, column order) and `scalars`
 * receives `CX_SCALAR_VALUES` values.
 *
 * # Safety
 * `game` must be a live handle; the buffers must hold the stated lengths.
 */
enum CxStatus cx_game_encode(const struct CxGame *game,
                             double *board,
                             size_t board_len,
                             double *scalars,
                             size_t scalars_len);

/**
 * Seat to move, or -1 when the game is over or the handle is null.
 *
 * # Safety
 * `game` must be a live handle or null.
 */
int32_t cx_game_acting_player(const struct CxGame *game);

/**
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum CxStatus cx_game_is_terminal(const struct CxGame *game, bool *out);

/**
 * Winning seat, -1 for a draw or -2 while the game is running.
 *
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum CxStatus cx_game_winner(const struct CxGame *game, int32_t *out);

/**
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum CxStatus cx_game_victory_points(const struct CxGame *game,
                                     uint32_t player,
                                     bool include_hidden,
                                     uint32_t *out);

/**
 * Loads a checkpoint file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CxStatus cx_network_load(const char *path, struct CxNetwork **out);

/**
 * # Safety
 * `net` must come from [`cx_network_load`] and not be freed twice.
 */
void cx_network_free(struct CxNetwork *net);

/**
 * Length of the network's logit vector, 0 for a null handle.
 *
 * # Safety
 * `net` must be a live handle or null.
 */
size_t cx_network_action_count(const struct CxNetwork *net);

/**
 * Runs the network on the acting player's view of `game`, writing raw
 * logits and the value estimate.
 *
 * # Safety
 * Handles must be live; `logits` must hold `logits_len` values and
 * `value` must be writable.
 */
enum CxStatus cx_network_forward(const struct CxNetwork *net,
                                 const struct CxGame *game,
                                 double *logits,
                                 size_t logits_len,
                                 double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATAN_XDIM_H */
