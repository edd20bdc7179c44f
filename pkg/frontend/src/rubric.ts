/** Coding rubric shown beside every card. Single locale for now; keeping
 * all coder-facing instruction text in this one file so the wording the
 * coders apply is pinned and reviewable. */

export interface RubricSection {
  title: string;
  points: string[];
}

export const RUBRIC: Record<'pc' | 'ae', RubricSection> = {
  pc: {
    title: 'People-centrism',
    points: [
      'Accept when the paragraph speaks of the people, society, citizens, or the nation as one homogeneous unit with favourable qualities.',
      'Accept when a singular word such as "a person" or "a citizen" stands for the whole people rather than a specific individual.',
      'Reject when the paragraph addresses specific individuals or distinct groups (for example women, children, pensioners) rather than society in general.',
    ],
  },
  ae: {
    title: 'Anti-elitism',
    points: [
      'Accept when the paragraph criticizes the elite as a homogeneous group with negative qualities.',
      'Accept when the criticism is generalized to the government, politicians, bureaucracy, oligarchy, or financial, cultural, or academic elites.',
      'Reject when the criticism targets particular named parties or officeholders rather than the elite in general.',
    ],
  },
};

export const SHORTCUT_LEGEND = [
  ['a', 'accept the model coding'],
  ['r', 'reject the model coding'],
  ['j / →', 'next card'],
  ['k / ←', 'previous card'],
] as const;
