export const MOVIES_CHART = {
  mark: 'bar',
  encoding: { x: { field: 'Year' }, y: { field: 'Count' }, color: { field: 'Genre' } },
  title: 'Movies released by genre',
};

export const MOVIES_DATA = [
  [2006, 20, 80],
  [2007, 35, 70],
  [2008, 28, 55],
  [2009, 30, 40],
  [2010, 26, 25],
].flatMap(([year, action, drama]) => [
  { Year: year, Genre: 'Action', Count: action },
  { Year: year, Genre: 'Drama', Count: drama },
]);
