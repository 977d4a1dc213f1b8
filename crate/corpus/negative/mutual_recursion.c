int g(int n);
int f(int n) { int r = g(n); return r; }
int g(int n) { int r = f(n); return r; }
int main() { int r = f(1); }
